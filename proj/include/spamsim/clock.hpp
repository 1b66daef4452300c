#ifndef SPAMSIM_CLOCK_HPP
#define SPAMSIM_CLOCK_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spamsim/time.hpp"

namespace spamsim {

enum class ChargeKind { Network, Filter };

struct Charge {
    ChargeKind kind;
    Micros amount;
};

// Monotone virtual clock. Every advance goes through charge() and lands in
// the ledger, so a run's total can be audited as the sum of its parts.
class VirtualClock {
public:
    Micros now() const { return now_; }

    void charge(ChargeKind kind, Micros amount) {
        if (amount < 0) throw std::runtime_error("negative charge");
        if (amount == 0) return;
        now_ += amount;
        ledger_.push_back({kind, amount});
    }

    Micros total(ChargeKind kind) const {
        Micros sum = 0;
        for (const auto& c : ledger_)
            if (c.kind == kind) sum += c.amount;
        return sum;
    }

    const std::vector<Charge>& ledger() const { return ledger_; }

private:
    Micros now_ = 0;
    std::vector<Charge> ledger_;
};

// Virtual-time prices. filter_cost is the price of one full content-filter
// execution; the built-in profiles divide the published per-1000-email totals
// by 1000.
struct CostModel {
    std::string profile = "custom";
    Micros session_setup = seconds_to_micros(0.05);
    Micros per_command = seconds_to_micros(0.001);
    Micros per_byte = 1;  // 1e-6 s
    Micros filter_cost = 0;

    static CostModel named(const std::string& name) {
        CostModel m;
        m.profile = name;
        if (name == "hotmail")
            m.filter_cost = 100;  // 0.1 s / 1000
        else if (name == "aol")
            m.filter_cost = 90;  // 0.09 s / 1000
        else if (name == "microsoft")
            m.filter_cost = 100;  // 0.1 s / 1000
        else if (name == "trec")
            m.filter_cost = 200000;  // 200 s / 1000
        else if (name == "dspam")
            m.filter_cost = 250000;  // 250 s / 1000
        else if (name == "custom")
            m.filter_cost = 0;
        else
            throw std::runtime_error("unknown cost profile: " + name);
        return m;
    }

    static const std::vector<std::string>& builtin_profiles() {
        static const std::vector<std::string> names = {"hotmail", "aol", "microsoft", "trec",
                                                       "dspam"};
        return names;
    }
};

inline Micros charge_filter(VirtualClock& clock, const CostModel& cost, std::uint64_t executions) {
    Micros amount = static_cast<Micros>(executions) * cost.filter_cost;
    clock.charge(ChargeKind::Filter, amount);
    return amount;
}

}  // namespace spamsim

#endif  // SPAMSIM_CLOCK_HPP
