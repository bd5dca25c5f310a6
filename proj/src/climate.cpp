#include "quntherm/climate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quntherm/csvio.hpp"

namespace quntherm {

namespace {

constexpr double kKelvinOffset = 273.15;
constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

double clamped_hourly(const std::vector<double>& v, double t_s) {
    const double h = t_s / 3600.0;
    if (h <= 0.0) return v.front();
    const double last = static_cast<double>(v.size() - 1);
    if (h >= last) return v.back();
    const std::size_t i = static_cast<std::size_t>(h);
    const double w = h - static_cast<double>(i);
    return v[i] + w * (v[i + 1] - v[i]);
}

}  // namespace

const char* orientation_name(Orientation o) {
    switch (o) {
        case Orientation::North: return "N";
        case Orientation::South: return "S";
        case Orientation::East: return "E";
        case Orientation::West: return "W";
        case Orientation::Roof: return "H";
    }
    return "?";
}

Orientation orientation_from_string(const std::string& s) {
    std::string t;
    for (char c : s) t.push_back(static_cast<char>(std::tolower(c)));
    if (t == "n" || t == "north") return Orientation::North;
    if (t == "s" || t == "south") return Orientation::South;
    if (t == "e" || t == "east") return Orientation::East;
    if (t == "w" || t == "west") return Orientation::West;
    if (t == "h" || t == "roof" || t == "horizontal") return Orientation::Roof;
    throw std::invalid_argument("unknown orientation: " + s);
}

CalendarDate parse_iso8601(const std::string& s) {
    CalendarDate d;
    char trailing = '\0';
    const int got = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%c", &d.year, &d.month, &d.day,
                                &d.hour, &d.minute, &d.second, &trailing);
    if (got < 6 || (got == 7 && trailing != 'Z'))
        throw std::invalid_argument("bad ISO-8601 timestamp: " + s);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.hour < 0 || d.hour > 23 || d.minute < 0 ||
        d.minute > 59 || d.second < 0 || d.second > 60)
        throw std::invalid_argument("out-of-range ISO-8601 timestamp: " + s);
    const int dim = kMonthDays[static_cast<std::size_t>(d.month - 1)] +
                    (d.month == 2 && is_leap(d.year) ? 1 : 0);
    if (d.day > dim) throw std::invalid_argument("out-of-range ISO-8601 timestamp: " + s);
    return d;
}

std::string format_iso8601(const CalendarDate& d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", d.year, d.month, d.day,
                  d.hour, d.minute, d.second);
    return buf;
}

long long epoch_seconds(const CalendarDate& d) {
    // Howard Hinnant's days-from-civil.
    const int y = d.year - (d.month <= 2 ? 1 : 0);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long long days = era * 146097LL + static_cast<long long>(doe) - 719468LL;
    return days * 86400LL + d.hour * 3600LL + d.minute * 60LL + d.second;
}

double ClimateSeries::outdoor_at(double t_s) const { return clamped_hourly(t_out_K, t_s); }

double ClimateSeries::solar_at(Orientation o, double t_s) const {
    return clamped_hourly(solar_Wm2[static_cast<std::size_t>(o)], t_s);
}

double ClimateSeries::sky_at(double t_s) const { return clamped_hourly(t_sky_K, t_s); }

void ClimateSeries::validate() const {
    if (size() < 2) throw std::invalid_argument("ClimateSeries: need at least two samples");
    for (const auto& col : solar_Wm2)
        if (col.size() != size())
            throw std::invalid_argument("ClimateSeries: solar column length mismatch");
    if (t_sky_K.size() != size())
        throw std::invalid_argument("ClimateSeries: sky column length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(t_out_K[i] > 0.0 && std::isfinite(t_out_K[i])))
            throw std::invalid_argument("ClimateSeries: non-physical outdoor temperature at row " +
                                        std::to_string(i + 2));
        for (const auto& col : solar_Wm2)
            if (!(col[i] >= 0.0 && std::isfinite(col[i])))
                throw std::invalid_argument("ClimateSeries: negative solar flux at row " +
                                            std::to_string(i + 2));
    }
}

ClimateSeries load_climate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open climate file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty climate file: " + path);
    const std::vector<std::string> header = split_csv_line(line);
    const std::vector<std::string> expected = {
        "timestamp_iso8601", "t_out_C",       "q_solar_N_Wm2", "q_solar_S_Wm2",
        "q_solar_E_Wm2",     "q_solar_W_Wm2", "q_solar_H_Wm2", "t_sky_C"};
    const bool has_sky = header.size() == expected.size();
    const std::size_t want = has_sky ? expected.size() : expected.size() - 1;
    if (header.size() != want)
        throw std::invalid_argument("climate header must have 7 or 8 columns: " + path);
    for (std::size_t i = 0; i < want; ++i)
        if (header[i] != expected[i])
            throw std::invalid_argument("unexpected climate column '" + header[i] +
                                        "' (want '" + expected[i] + "')");

    ClimateSeries series;
    long long prev_epoch = 0;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != want)
            throw std::invalid_argument("row " + std::to_string(row) + ": expected " +
                                        std::to_string(want) + " cells");
        CalendarDate stamp;
        try {
            stamp = parse_iso8601(cells[0]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("row " + std::to_string(row) + ": " + e.what());
        }
        const long long epoch = epoch_seconds(stamp);
        if (series.size() == 0) {
            series.start = stamp;
        } else if (epoch - prev_epoch != 3600) {
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": timestamps must advance by exactly one hour");
        }
        prev_epoch = epoch;

        auto cell = [&](std::size_t i, const char* what) {
            try {
                return parse_double(cells[i], what);
            } catch (const std::exception& e) {
                throw std::invalid_argument("row " + std::to_string(row) + ": " + e.what());
            }
        };
        const double t_out = cell(1, "t_out_C") + kKelvinOffset;
        series.t_out_K.push_back(t_out);
        for (std::size_t o = 0; o < 5; ++o) {
            const double q = cell(2 + o, "q_solar");
            if (q < 0.0)
                throw std::invalid_argument("row " + std::to_string(row) +
                                            ": solar flux must be non-negative");
            series.solar_Wm2[o].push_back(q);
        }
        series.t_sky_K.push_back(has_sky ? cell(7, "t_sky_C") + kKelvinOffset : t_out - 10.0);
    }
    series.validate();
    return series;
}

void write_climate_csv(const ClimateSeries& series, const std::string& path) {
    series.validate();
    CsvWriter out(path, {"timestamp_iso8601", "t_out_C", "q_solar_N_Wm2", "q_solar_S_Wm2",
                         "q_solar_E_Wm2", "q_solar_W_Wm2", "q_solar_H_Wm2", "t_sky_C"});
    const long long base = epoch_seconds(series.start);
    for (std::size_t i = 0; i < series.size(); ++i) {
        CalendarDate stamp = series.start;
        // Re-derive the calendar stamp by walking whole hours from the start.
        long long e = base + static_cast<long long>(i) * 3600;
        long long days = e / 86400 - base / 86400;
        stamp.hour = static_cast<int>((e % 86400) / 3600);
        stamp.month = series.start.month;
        stamp.day = series.start.day;
        stamp.year = series.start.year;
        while (days > 0) {
            int dim = kMonthDays[static_cast<std::size_t>(stamp.month - 1)] +
                      (stamp.month == 2 && is_leap(stamp.year) ? 1 : 0);
            if (stamp.day < dim) {
                ++stamp.day;
            } else {
                stamp.day = 1;
                if (stamp.month == 12) {
                    stamp.month = 1;
                    ++stamp.year;
                } else {
                    ++stamp.month;
                }
            }
            --days;
        }
        out.row({format_iso8601(stamp), format_double(series.t_out_K[i] - kKelvinOffset),
                 format_double(series.solar_Wm2[0][i]), format_double(series.solar_Wm2[1][i]),
                 format_double(series.solar_Wm2[2][i]), format_double(series.solar_Wm2[3][i]),
                 format_double(series.solar_Wm2[4][i]),
                 format_double(series.t_sky_K[i] - kKelvinOffset)});
    }
}

ClimateSeries synthesize_climate(const ClimateProfile& profile) {
    if (!(profile.t_min_C <= profile.t_mean_C && profile.t_mean_C <= profile.t_max_C))
        throw std::invalid_argument("synthesize_climate: need t_min <= t_mean <= t_max");
    if (profile.solar_peak_Wm2 < 0.0 || profile.noise_std_K < 0.0)
        throw std::invalid_argument("synthesize_climate: negative amplitude");
    if (is_leap(profile.start_year))
        throw std::invalid_argument("synthesize_climate: start_year must be a non-leap year");

    constexpr int kHours = 8760;
    const double up = profile.t_max_C - profile.t_mean_C;
    const double down = profile.t_mean_C - profile.t_min_C;

    // Composite wave in [-1,1]; +1 is hit exactly on day 14 at 14:00 so the
    // zero-noise series touches t_max exactly and t_min to within a hair.
    std::vector<double> shape(kHours);
    for (int i = 0; i < kHours; ++i) {
        const int d = i / 24, h = i % 24;
        const double seasonal = std::cos(2.0 * M_PI * (d - 14) / 365.0);
        const double diurnal = std::cos(2.0 * M_PI * (h - 14) / 24.0);
        shape[static_cast<std::size_t>(i)] = 0.65 * seasonal + 0.35 * diurnal;
    }

    ClimateSeries series;
    series.start = CalendarDate{profile.start_year, 1, 1, 0, 0, 0};
    series.t_out_K.resize(kHours);
    for (auto& col : series.solar_Wm2) col.resize(kHours);
    series.t_sky_K.resize(kHours);

    std::vector<double> t_c(kHours);
    double mean = 0.0, weight = 0.0;
    for (int i = 0; i < kHours; ++i) {
        const double r = shape[static_cast<std::size_t>(i)];
        t_c[static_cast<std::size_t>(i)] = profile.t_mean_C + (r >= 0.0 ? r * up : r * down);
        mean += t_c[static_cast<std::size_t>(i)];
        weight += 1.0 - r * r;
    }
    mean /= kHours;
    // Mean correction that vanishes at the extremes (where |r| = 1).
    const double gain = (profile.t_mean_C - mean) * kHours / weight;
    for (int i = 0; i < kHours; ++i) {
        const double r = shape[static_cast<std::size_t>(i)];
        t_c[static_cast<std::size_t>(i)] += gain * (1.0 - r * r);
    }

    std::mt19937_64 rng(profile.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double ar = 0.0;
    for (int i = 0; i < kHours; ++i) {
        if (profile.noise_std_K > 0.0)
            ar = 0.8 * ar + profile.noise_std_K * 0.6 * gauss(rng);
        series.t_out_K[static_cast<std::size_t>(i)] =
            t_c[static_cast<std::size_t>(i)] + ar + kKelvinOffset;
        series.t_sky_K[static_cast<std::size_t>(i)] =
            series.t_out_K[static_cast<std::size_t>(i)] - profile.sky_offset_K;
    }

    // Solar: half-sine day bells, orientation-weighted, with a seasonal swing.
    // Southern hemisphere: the north facade peaks in winter, the south facade
    // sees only a modest summer share, east/west split morning/afternoon.
    for (int i = 0; i < kHours; ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        const int d = i / 24, h = i % 24;
        const double seasonal = std::cos(2.0 * M_PI * (d - 14) / 365.0);
        const double day_bell = h >= 6 && h <= 18
                                    ? std::sin(M_PI * (h - 6) / 12.0)
                                    : 0.0;
        const double morning = h >= 6 && h <= 12 ? std::sin(M_PI * (h - 6) / 6.0) : 0.0;
        const double afternoon = h >= 12 && h <= 18 ? std::sin(M_PI * (h - 12) / 6.0) : 0.0;
        const double peak = profile.solar_peak_Wm2;
        series.solar_Wm2[static_cast<std::size_t>(Orientation::Roof)][idx] =
            peak * (0.75 + 0.25 * seasonal) * day_bell;
        series.solar_Wm2[static_cast<std::size_t>(Orientation::North)][idx] =
            peak * 0.70 * (1.0 - 0.30 * seasonal) * day_bell;
        series.solar_Wm2[static_cast<std::size_t>(Orientation::South)][idx] =
            peak * 0.30 * (1.0 + 0.30 * seasonal) * day_bell;
        series.solar_Wm2[static_cast<std::size_t>(Orientation::East)][idx] = peak * 0.55 * morning;
        series.solar_Wm2[static_cast<std::size_t>(Orientation::West)][idx] =
            peak * 0.55 * afternoon;
    }
    series.validate();
    return series;
}

std::vector<ClimateProfile> builtin_city_profiles() {
    std::vector<ClimateProfile> cities(4);
    cities[0].name = "curitiba";
    cities[0].t_min_C = -2.0;
    cities[0].t_mean_C = 16.3;
    cities[0].t_max_C = 30.9;
    cities[1].name = "rio_de_janeiro";
    cities[1].t_min_C = 13.0;
    cities[1].t_mean_C = 23.5;
    cities[1].t_max_C = 38.2;
    cities[2].name = "sao_paulo";
    cities[2].t_min_C = 7.5;
    cities[2].t_mean_C = 18.8;
    cities[2].t_max_C = 32.8;
    cities[3].name = "salvador";
    cities[3].t_min_C = 14.2;
    cities[3].t_mean_C = 25.3;
    cities[3].t_max_C = 33.5;
    return cities;
}

ClimateProfile city_profile(const std::string& name) {
    std::string t;
    for (char c : name) t.push_back(c == ' ' || c == '-' ? '_' : static_cast<char>(std::tolower(c)));
    for (const auto& p : builtin_city_profiles())
        if (p.name == t) return p;
    throw std::invalid_argument("unknown city profile: " + name +
                                " (try curitiba, rio_de_janeiro, sao_paulo, salvador)");
}

}  // namespace quntherm
