#include "glucast/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace glucast::pipeline {

namespace {

constexpr double kOutlierJumpMgdl = 50.0;  // per 5-minute step, both flanks
constexpr std::int64_t kSnapToleranceS = 60;

// Howard Hinnant's civil-date algorithms (proleptic Gregorian, UTC).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yr + (m <= 2));
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawRow {
    std::int64_t epoch = 0;
    double value = 0.0;
    std::size_t line = 0;
};

}  // namespace

double missing_value() {
    return std::numeric_limits<double>::quiet_NaN();
}

bool is_missing(double v) {
    return std::isnan(v);
}

std::size_t GlucoseSeries::present_count() const {
    std::size_t n = 0;
    for (double v : values) n += is_missing(v) ? 0 : 1;
    return n;
}

std::int64_t parse_timestamp(const std::string& text) {
    const std::string s = strip(text);
    if (all_digits(s)) return std::stoll(s);

    int y = 0;
    unsigned mo = 0, da = 0, hh = 0, mi = 0, ss = 0;
    char sep = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c%2u:%2u:%2u", &y, &mo, &da, &sep, &hh, &mi, &ss) != 7 ||
        (sep != 'T' && sep != ' ')) {
        throw InputError("unparseable timestamp: '" + s + "'");
    }
    if (mo < 1 || mo > 12 || da < 1 || da > 31 || hh > 23 || mi > 59 || ss > 60) {
        throw InputError("timestamp out of range: '" + s + "'");
    }
    // Anything after the seconds field other than 'Z' is rejected.
    const std::size_t base_len = 19;
    if (s.size() > base_len && !(s.size() == base_len + 1 && s[base_len] == 'Z')) {
        throw InputError("unparseable timestamp suffix: '" + s + "'");
    }
    return days_from_civil(y, mo, da) * 86400 + hh * 3600 + mi * 60 + ss;
}

std::string format_timestamp(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t rem = epoch_s % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0;
    unsigned mo = 0, da = 0;
    civil_from_days(days, y, mo, da);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, da,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

GlucoseSeries ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);

    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    ++lineno;
    {
        const std::string header = strip(line);
        if (header != "timestamp,glucose_mgdl") {
            throw InputError(path + ":1: expected header 'timestamp,glucose_mgdl', got '" +
                             header + "'");
        }
    }

    std::vector<RawRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const std::size_t comma = trimmed.find(',');
        if (comma == std::string::npos) {
            throw InputError(path + ":" + std::to_string(lineno) + ": missing comma");
        }
        RawRow row;
        row.line = lineno;
        try {
            row.epoch = parse_timestamp(trimmed.substr(0, comma));
        } catch (const InputError& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const std::string value_text = strip(trimmed.substr(comma + 1));
        try {
            std::size_t used = 0;
            row.value = std::stod(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw InputError(path + ":" + std::to_string(lineno) + ": unparseable glucose value '" +
                             value_text + "'");
        }
        if (std::isnan(row.value) || std::isinf(row.value)) {
            throw InputError(path + ":" + std::to_string(lineno) + ": non-finite glucose value");
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw InputError(path + ": no data rows");

    // Slot 0 sits at the earliest row; everything else must land within
    // +-60s of some slot on the 5-minute grid anchored there.
    std::int64_t t0 = rows.front().epoch;
    for (const auto& r : rows) t0 = std::min(t0, r.epoch);

    std::int64_t max_slot = 0;
    std::vector<std::pair<std::int64_t, const RawRow*>> slotted;
    slotted.reserve(rows.size());
    for (const auto& r : rows) {
        const std::int64_t rel = r.epoch - t0;
        const auto slot = static_cast<std::int64_t>(
            std::llround(static_cast<double>(rel) / static_cast<double>(kGridSeconds)));
        const std::int64_t err = rel - slot * kGridSeconds;
        if (err > kSnapToleranceS || err < -kSnapToleranceS) {
            throw InputError(path + ":" + std::to_string(r.line) +
                             ": timestamp off the 5-minute grid by " + std::to_string(err) + "s");
        }
        slotted.emplace_back(slot, &r);
        max_slot = std::max(max_slot, slot);
    }

    GlucoseSeries s;
    s.subject_id = path;
    s.start_epoch_s = t0;
    s.values.assign(static_cast<std::size_t>(max_slot) + 1, missing_value());
    std::vector<bool> seen(s.values.size(), false);
    for (const auto& [slot, row] : slotted) {
        const auto idx = static_cast<std::size_t>(slot);
        if (seen[idx]) {
            throw InputError(path + ":" + std::to_string(row->line) + ": duplicate grid slot " +
                             std::to_string(slot));
        }
        seen[idx] = true;
        if (row->value >= kMinValidMgdl && row->value <= kMaxValidMgdl) {
            s.values[idx] = row->value;
        }
        // Out-of-range readings (sensor-invalid, e.g. 0) stay missing.
    }
    return s;
}

GlucoseSeries repair_singletons(GlucoseSeries s) {
    // Each pass works from a snapshot; passes repeat until stable so a
    // second application is a no-op. Midpoint replacements contract the
    // local jumps, so the loop settles quickly; the cap is a safety net.
    constexpr int kMaxPasses = 256;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool changed = false;
        const std::vector<double> snap = s.values;
        for (std::size_t i = 1; i + 1 < snap.size(); ++i) {
            const double prev = snap[i - 1];
            const double next = snap[i + 1];
            if (is_missing(prev) || is_missing(next)) continue;
            const double mid = 0.5 * (prev + next);
            const double cur = snap[i];
            if (is_missing(cur)) {
                s.values[i] = mid;
                changed = true;
            } else if (std::abs(cur - prev) > kOutlierJumpMgdl &&
                       std::abs(cur - next) > kOutlierJumpMgdl && cur != mid) {
                s.values[i] = mid;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return s;
}

std::vector<SubDataset> split_on_gaps(const GlucoseSeries& s) {
    std::vector<SubDataset> subs;
    std::size_t i = 0;
    const std::size_t n = s.values.size();
    while (i < n) {
        if (is_missing(s.values[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !is_missing(s.values[j])) ++j;
        SubDataset sub;
        sub.subject_id = s.subject_id;
        sub.start_slot = i;
        sub.start_epoch_s = s.start_epoch_s + static_cast<std::int64_t>(i) * kGridSeconds;
        sub.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(i),
                          s.values.begin() + static_cast<std::ptrdiff_t>(j));
        subs.push_back(std::move(sub));
        i = j;
    }
    return subs;
}

Partition partition_by_length(std::vector<SubDataset> subs, std::size_t min_len) {
    Partition out;
    for (auto& sub : subs) {
        if (sub.values.size() >= min_len) {
            out.kept.push_back(std::move(sub));
        } else {
            out.pool.push_back(std::move(sub));
        }
    }
    return out;
}

Scaler fit_scaler(const Vec& train_samples) {
    if (train_samples.size() < 2) {
        throw NumericError("fit_scaler: need at least two training samples");
    }
    double lo = train_samples[0];
    double hi = train_samples[0];
    for (double v : train_samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw NumericError("fit_scaler: constant training data");
    return Scaler{lo, hi};
}

WindowSet make_windows(const SubDataset& sub, std::size_t window_len,
                       std::size_t horizon_steps, const Scaler& scaler) {
    if (window_len == 0 || horizon_steps == 0) {
        throw InputError("make_windows: window length and horizon must be positive");
    }
    const std::size_t len = sub.values.size();
    if (len < window_len + horizon_steps) {
        throw InputError("make_windows: sub-dataset of length " + std::to_string(len) +
                         " too short for L=" + std::to_string(window_len) +
                         ", k=" + std::to_string(horizon_steps));
    }
    WindowSet ws;
    ws.window_len = window_len;
    ws.horizon_steps = horizon_steps;
    ws.scaler = scaler;
    const std::size_t n = len - window_len - horizon_steps + 1;
    ws.inputs.reserve(n);
    ws.targets.reserve(n);
    ws.start_index.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec window(window_len);
        for (std::size_t t = 0; t < window_len; ++t) window[t] = scaler.apply(sub.values[i + t]);
        ws.inputs.push_back(std::move(window));
        ws.targets.push_back(scaler.apply(sub.values[i + window_len - 1 + horizon_steps]));
        ws.start_index.push_back(sub.start_slot + i);
    }
    return ws;
}

WindowSet make_pool_windows(const std::vector<SubDataset>& segments,
                            std::size_t window_len, std::size_t horizon_steps,
                            const Scaler& scaler) {
    WindowSet out;
    out.window_len = window_len;
    out.horizon_steps = horizon_steps;
    out.scaler = scaler;
    std::size_t offset = 0;
    for (const auto& seg : segments) {
        if (seg.values.size() < window_len + horizon_steps) {
            offset += seg.values.size();
            continue;  // segment too short to yield a window
        }
        SubDataset local = seg;
        local.start_slot = offset;
        WindowSet ws = make_windows(local, window_len, horizon_steps, scaler);
        out.inputs.insert(out.inputs.end(), ws.inputs.begin(), ws.inputs.end());
        out.targets.insert(out.targets.end(), ws.targets.begin(), ws.targets.end());
        out.start_index.insert(out.start_index.end(), ws.start_index.begin(), ws.start_index.end());
        offset += seg.values.size();
    }
    return out;
}

Split chrono_split(const WindowSet& ws, double train_frac) {
    const std::size_t n = ws.size();
    if (n < 3) throw InputError("chrono_split: need at least 3 windows");
    const auto n_train =
        static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n)));
    const std::size_t test_begin = std::min(n, n_train + ws.horizon_steps);

    auto take = [&](std::size_t b, std::size_t e) {
        WindowSet part;
        part.window_len = ws.window_len;
        part.horizon_steps = ws.horizon_steps;
        part.scaler = ws.scaler;
        part.inputs.assign(ws.inputs.begin() + static_cast<std::ptrdiff_t>(b),
                           ws.inputs.begin() + static_cast<std::ptrdiff_t>(e));
        part.targets.assign(ws.targets.begin() + static_cast<std::ptrdiff_t>(b),
                            ws.targets.begin() + static_cast<std::ptrdiff_t>(e));
        part.start_index.assign(ws.start_index.begin() + static_cast<std::ptrdiff_t>(b),
                                ws.start_index.begin() + static_cast<std::ptrdiff_t>(e));
        return part;
    };

    return Split{take(0, n_train), take(test_begin, n)};
}

Vec train_region_samples(const std::vector<SubDataset>& segments,
                         std::size_t window_len, std::size_t horizon_steps,
                         double train_frac) {
    std::size_t total_windows = 0;
    for (const auto& seg : segments) {
        if (seg.values.size() >= window_len + horizon_steps) {
            total_windows += seg.values.size() - window_len - horizon_steps + 1;
        }
    }
    auto remaining =
        static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(total_windows)));

    Vec out;
    for (const auto& seg : segments) {
        if (remaining == 0) break;
        if (seg.values.size() < window_len + horizon_steps) continue;
        const std::size_t seg_windows = seg.values.size() - window_len - horizon_steps + 1;
        const std::size_t m = std::min(remaining, seg_windows);
        // Window j touches inputs [j, j+L) and the target at j+L-1+k.
        const std::size_t last_touched = (m - 1) + window_len - 1 + horizon_steps;
        for (std::size_t i = 0; i <= last_touched; ++i) out.push_back(seg.values[i]);
        remaining -= m;
    }
    return out;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open file for writing: " + path);
    return out;
}

void write_value_row(std::ofstream& out, std::int64_t epoch_s, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    out << format_timestamp(epoch_s) << ',' << buf << '\n';
}

}  // namespace

void write_series_csv(const std::string& path, const GlucoseSeries& s) {
    auto out = open_for_write(path);
    out << "timestamp,glucose_mgdl\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (is_missing(s.values[i])) continue;
        write_value_row(out, s.start_epoch_s + static_cast<std::int64_t>(i) * kGridSeconds,
                        s.values[i]);
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_sub_csv(const std::string& path, const SubDataset& sub) {
    GlucoseSeries s;
    s.subject_id = sub.subject_id;
    s.start_epoch_s = sub.start_epoch_s;
    s.values = sub.values;
    write_series_csv(path, s);
}

void write_pool_csv(const std::string& path, const std::vector<SubDataset>& segments) {
    auto out = open_for_write(path);
    out << "timestamp,glucose_mgdl,segment_id\n";
    for (std::size_t seg_id = 0; seg_id < segments.size(); ++seg_id) {
        const auto& seg = segments[seg_id];
        for (std::size_t i = 0; i < seg.values.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.4f", seg.values[i]);
            out << format_timestamp(seg.start_epoch_s +
                                    static_cast<std::int64_t>(i) * kGridSeconds)
                << ',' << buf << ',' << seg_id << '\n';
        }
    }
    if (!out) throw ConfigError("write failed: " + path);
}

std::vector<SubDataset> load_pool_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open pool file: " + path);

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    ++lineno;
    if (strip(line) != "timestamp,glucose_mgdl,segment_id") {
        throw InputError(path + ":1: expected header 'timestamp,glucose_mgdl,segment_id'");
    }

    std::vector<SubDataset> segments;
    long current_id = -1;
    std::int64_t prev_epoch = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const std::size_t c1 = trimmed.find(',');
        const std::size_t c2 = (c1 == std::string::npos) ? std::string::npos
                                                         : trimmed.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw InputError(path + ":" + std::to_string(lineno) + ": expected three columns");
        }
        std::int64_t epoch = 0;
        double value = 0.0;
        long seg_id = 0;
        try {
            epoch = parse_timestamp(trimmed.substr(0, c1));
            value = std::stod(trimmed.substr(c1 + 1, c2 - c1 - 1));
            seg_id = std::stol(trimmed.substr(c2 + 1));
        } catch (const std::exception& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (seg_id != current_id) {
            if (seg_id != current_id + 1) {
                throw InputError(path + ":" + std::to_string(lineno) +
                                 ": segment ids must be contiguous and ascending");
            }
            current_id = seg_id;
            SubDataset seg;
            seg.subject_id = "pool_segment_" + std::to_string(seg_id);
            seg.start_epoch_s = epoch;
            segments.push_back(std::move(seg));
        } else if (epoch - prev_epoch != kGridSeconds) {
            throw InputError(path + ":" + std::to_string(lineno) +
                             ": segment breaks the 5-minute grid");
        }
        segments.back().values.push_back(value);
        prev_epoch = epoch;
    }
    if (segments.empty()) throw InputError(path + ": no data rows");
    return segments;
}

}  // namespace glucast::pipeline
