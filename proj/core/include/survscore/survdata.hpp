#pragma once

// Two-arm time-to-event data and the risk table built from it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace survscore {

enum class Arm : std::uint8_t { control = 0, experimental = 1 };

inline constexpr int arm_index(Arm a) noexcept { return static_cast<int>(a); }

struct Subject {
    double time = 0.0;  // months, > 0
    Arm arm = Arm::control;
    bool event = false;  // false = censored

    friend bool operator==(const Subject&, const Subject&) = default;
};

/// Validated, immutable list of subjects in input order.
///
/// An empty dataset is representable (it is what `split_by_arm` yields for an
/// arm nobody was randomized to); operations that need subjects check for it.
class TrialDataset {
public:
    TrialDataset() = default;
    /// Throws survscore::Error if any subject has a nonpositive or non-finite time.
    explicit TrialDataset(std::vector<Subject> subjects);

    std::span<const Subject> subjects() const noexcept { return subjects_; }
    std::size_t size() const noexcept { return subjects_.size(); }
    bool empty() const noexcept { return subjects_.empty(); }
    const Subject& operator[](std::size_t k) const { return subjects_[k]; }

    std::size_t experimental_count() const noexcept { return n_experimental_; }
    std::size_t control_count() const noexcept { return subjects_.size() - n_experimental_; }
    std::size_t event_count() const noexcept { return n_events_; }

    /// Largest observed time (event or censoring); 0 for an empty dataset.
    double max_time() const noexcept { return max_time_; }
    double total_time() const noexcept;

    std::vector<Arm> arms() const;

    /// Copy with subject `k` removed, order otherwise preserved.
    TrialDataset without(std::size_t k) const;

    /// Throws unless both arms are non-empty.
    void require_two_arms() const;

private:
    std::vector<Subject> subjects_;
    std::size_t n_experimental_ = 0;
    std::size_t n_events_ = 0;
    double max_time_ = 0.0;
};

/// Parses `time,arm,event` CSV text. Errors are ParseError with the offending line.
TrialDataset parse_dataset(std::string_view text);
TrialDataset read_dataset(const std::string& path);
std::string format_dataset(const TrialDataset& ds);

/// (control subset, experimental subset), each in input order.
std::pair<TrialDataset, TrialDataset> split_by_arm(const TrialDataset& ds);

struct RiskRow {
    double time = 0.0;
    std::array<int, 2> at_risk{};   // just prior to `time`, per arm
    std::array<int, 2> events{};    // at `time`
    std::array<int, 2> censored{};  // in [time, next event time)

    int n() const noexcept { return at_risk[0] + at_risk[1]; }
    int o() const noexcept { return events[0] + events[1]; }
    double expected(Arm a) const noexcept {
        return static_cast<double>(o()) * at_risk[arm_index(a)] / n();
    }
};

/// One row per distinct event time. A subject censored at exactly an event
/// time is at risk at that time and counted in that row's censored interval.
class RiskTable {
public:
    RiskTable(std::vector<RiskRow> rows, std::array<int, 2> censored_before_first);

    std::span<const RiskRow> rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const RiskRow& operator[](std::size_t j) const { return rows_[j]; }

    /// Subjects censored strictly before the first event time, per arm.
    const std::array<int, 2>& censored_before_first() const noexcept { return censored_before_first_; }

    /// Number of event times <= t. Zero means t precedes the first event time;
    /// otherwise row `interval_of(t) - 1` is the last event time not after t.
    std::size_t interval_of(double t) const;

private:
    std::vector<RiskRow> rows_;
    std::array<int, 2> censored_before_first_{};
};

/// Throws survscore::Error("no event times") when the dataset has no events.
RiskTable build_risk_table(const TrialDataset& ds);

}  // namespace survscore
