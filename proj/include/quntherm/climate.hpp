#pragma once

#include <array>
#include <string>
#include <vector>

namespace quntherm {

enum class Orientation { North, South, East, West, Roof };
const char* orientation_name(Orientation o);         // "N", "S", "E", "W", "H"
Orientation orientation_from_string(const std::string& s);
inline constexpr std::array<Orientation, 5> kAllOrientations = {
    Orientation::North, Orientation::South, Orientation::East, Orientation::West,
    Orientation::Roof};

struct CalendarDate {
    int year = 2021, month = 1, day = 1, hour = 0, minute = 0, second = 0;
};

CalendarDate parse_iso8601(const std::string& s);  // YYYY-MM-DDTHH:MM:SS with optional Z
std::string format_iso8601(const CalendarDate& d);
long long epoch_seconds(const CalendarDate& d);    // days-from-civil based

// Hourly outdoor weather: dry-bulb, per-orientation global solar irradiance
// (vertical N/S/E/W facades plus the horizontal roof plane) and sky
// temperature.  Temperatures are kelvin internally; the CSV file format uses
// degrees Celsius.
struct ClimateSeries {
    CalendarDate start;
    std::vector<double> t_out_K;
    std::array<std::vector<double>, 5> solar_Wm2;  // indexed by Orientation order above
    std::vector<double> t_sky_K;

    std::size_t size() const { return t_out_K.size(); }
    double hours() const { return static_cast<double>(size()); }

    // Linear interpolation in time (seconds from series start), clamped to
    // the first/last sample.
    double outdoor_at(double t_s) const;
    double solar_at(Orientation o, double t_s) const;
    double sky_at(double t_s) const;

    void validate() const;  // throws std::invalid_argument
};

// Strict loader for the hourly climate CSV
//   timestamp_iso8601,t_out_C,q_solar_N_Wm2,q_solar_S_Wm2,q_solar_E_Wm2,
//   q_solar_W_Wm2,q_solar_H_Wm2[,t_sky_C]
// Timestamps must advance in exact one-hour steps; solar columns must be
// non-negative.  Errors name the offending row.  When the sky column is
// missing, t_sky = t_out - 10 K.
ClimateSeries load_climate_csv(const std::string& path);
void write_climate_csv(const ClimateSeries& series, const std::string& path);

// Target statistics for the deterministic synthetic-year generator.
struct ClimateProfile {
    std::string name = "custom";
    double t_min_C = 0.0;
    double t_mean_C = 15.0;
    double t_max_C = 30.0;
    double solar_peak_Wm2 = 900.0;
    double sky_offset_K = 10.0;
    double noise_std_K = 0.4;
    unsigned long long seed = 1;
    int start_year = 2021;  // must be a non-leap year
};

// One synthetic year (8760 samples): an annual wave peaking mid-January (a
// southern-hemisphere summer) combined with a diurnal wave peaking at 14:00,
// shaped so the zero-noise series hits t_min/t_mean/t_max; seeded AR(1)
// noise on top.  North facades receive the most annual solar.
ClimateSeries synthesize_climate(const ClimateProfile& profile);

std::vector<ClimateProfile> builtin_city_profiles();
ClimateProfile city_profile(const std::string& name);

}  // namespace quntherm
