#include "survscore/survdata.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "survscore/error.hpp"

namespace survscore {

TrialDataset::TrialDataset(std::vector<Subject> subjects) : subjects_(std::move(subjects)) {
    for (std::size_t k = 0; k < subjects_.size(); ++k) {
        const Subject& s = subjects_[k];
        if (!std::isfinite(s.time) || s.time <= 0.0) {
            throw Error("subject " + std::to_string(k) + ": time must be positive and finite");
        }
        if (s.arm != Arm::control && s.arm != Arm::experimental) {
            throw Error("subject " + std::to_string(k) + ": arm must be 0 or 1");
        }
        if (s.arm == Arm::experimental) ++n_experimental_;
        if (s.event) ++n_events_;
        max_time_ = std::max(max_time_, s.time);
    }
}

double TrialDataset::total_time() const noexcept {
    return std::accumulate(subjects_.begin(), subjects_.end(), 0.0,
                           [](double acc, const Subject& s) { return acc + s.time; });
}

std::vector<Arm> TrialDataset::arms() const {
    std::vector<Arm> out;
    out.reserve(subjects_.size());
    for (const auto& s : subjects_) out.push_back(s.arm);
    return out;
}

TrialDataset TrialDataset::without(std::size_t k) const {
    if (k >= subjects_.size()) throw Error("subject index out of range");
    std::vector<Subject> rest;
    rest.reserve(subjects_.size() - 1);
    for (std::size_t i = 0; i < subjects_.size(); ++i) {
        if (i != k) rest.push_back(subjects_[i]);
    }
    return TrialDataset(std::move(rest));
}

void TrialDataset::require_two_arms() const {
    if (n_experimental_ == 0 || n_experimental_ == subjects_.size()) {
        throw Error("both arms must contain at least one subject");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool parse_binary(std::string_view field, int& out) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || (v != 0 && v != 1)) return false;
    out = v;
    return true;
}

}  // namespace

TrialDataset parse_dataset(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
    if (trim(text).empty()) throw ParseError(ParseErrorKind::empty_input, 1, "empty file");

    std::vector<Subject> subjects;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line =
            trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (line_no == 1) {
            if (line != "time,arm,event") {
                throw ParseError(ParseErrorKind::bad_header, line_no,
                                 "expected header 'time,arm,event', got '" + std::string(line) + "'");
            }
            continue;
        }

        std::array<std::string_view, 3> fields;
        std::size_t nfields = 0;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            const auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                     : comma - start));
            if (nfields < fields.size()) fields[nfields] = field;
            ++nfields;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (nfields != 3 || line.empty()) {
            throw ParseError(ParseErrorKind::malformed_row, line_no,
                             "expected 3 fields, got " + std::to_string(line.empty() ? 0 : nfields));
        }

        double time = 0.0;
        const auto [tptr, tec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), time);
        if (tec != std::errc{} || tptr != fields[0].data() + fields[0].size() || !std::isfinite(time)) {
            throw ParseError(ParseErrorKind::bad_time, line_no,
                             "time '" + std::string(fields[0]) + "' is not a finite number");
        }
        if (time <= 0.0) {
            throw ParseError(ParseErrorKind::nonpositive_time, line_no,
                             "time must be positive, got " + std::string(fields[0]));
        }
        int arm = 0;
        if (!parse_binary(fields[1], arm)) {
            throw ParseError(ParseErrorKind::bad_arm, line_no,
                             "arm must be 0 or 1, got '" + std::string(fields[1]) + "'");
        }
        int event = 0;
        if (!parse_binary(fields[2], event)) {
            throw ParseError(ParseErrorKind::bad_event, line_no,
                             "event must be 0 or 1, got '" + std::string(fields[2]) + "'");
        }
        subjects.push_back({time, static_cast<Arm>(arm), event == 1});
    }

    if (subjects.empty()) throw ParseError(ParseErrorKind::empty_input, line_no, "no data rows");
    return TrialDataset(std::move(subjects));
}

TrialDataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

std::string format_dataset(const TrialDataset& ds) {
    std::string out = "time,arm,event\n";
    char num[32];
    for (const auto& s : ds.subjects()) {
        std::snprintf(num, sizeof num, "%.6g", s.time);
        out += num;
        out += s.arm == Arm::experimental ? ",1," : ",0,";
        out += s.event ? "1\n" : "0\n";
    }
    return out;
}

std::pair<TrialDataset, TrialDataset> split_by_arm(const TrialDataset& ds) {
    std::vector<Subject> control;
    std::vector<Subject> experimental;
    for (const auto& s : ds.subjects()) {
        (s.arm == Arm::experimental ? experimental : control).push_back(s);
    }
    return {TrialDataset(std::move(control)), TrialDataset(std::move(experimental))};
}

RiskTable::RiskTable(std::vector<RiskRow> rows, std::array<int, 2> censored_before_first)
    : rows_(std::move(rows)), censored_before_first_(censored_before_first) {}

std::size_t RiskTable::interval_of(double t) const {
    const auto it = std::upper_bound(rows_.begin(), rows_.end(), t,
                                     [](double v, const RiskRow& r) { return v < r.time; });
    return static_cast<std::size_t>(it - rows_.begin());
}

RiskTable build_risk_table(const TrialDataset& ds) {
    if (ds.event_count() == 0) throw Error("no event times");

    std::vector<Subject> sorted(ds.subjects().begin(), ds.subjects().end());
    std::sort(sorted.begin(), sorted.end(), [](const Subject& a, const Subject& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.event > b.event;
    });

    std::array<int, 2> remaining{static_cast<int>(ds.control_count()),
                                 static_cast<int>(ds.experimental_count())};
    std::array<int, 2> before_first{};
    std::vector<RiskRow> rows;

    for (std::size_t k = 0; k < sorted.size();) {
        const double t = sorted[k].time;
        std::array<int, 2> events{};
        std::array<int, 2> censored{};
        std::size_t m = k;
        for (; m < sorted.size() && sorted[m].time == t; ++m) {
            (sorted[m].event ? events : censored)[arm_index(sorted[m].arm)] += 1;
        }
        if (events[0] + events[1] > 0) {
            rows.push_back({t, remaining, events, censored});
        } else if (rows.empty()) {
            before_first[0] += censored[0];
            before_first[1] += censored[1];
        } else {
            rows.back().censored[0] += censored[0];
            rows.back().censored[1] += censored[1];
        }
        for (int a = 0; a < 2; ++a) remaining[a] -= events[a] + censored[a];
        k = m;
    }
    return RiskTable(std::move(rows), before_first);
}

}  // namespace survscore
