#ifndef SPAMSIM_CONFIG_HPP
#define SPAMSIM_CONFIG_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spamsim/clock.hpp"
#include "spamsim/scenario.hpp"

namespace spamsim {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` configuration with '#' comments. Unknown keys fail fast.
// CLI flags override file values; the file overrides built-in defaults.
struct Config {
    std::string profile = "dspam";
    std::optional<double> session_setup_s;
    std::optional<double> per_command_s;
    std::optional<double> per_byte_s;
    std::optional<double> filter_cost_s;

    ContextTemplate context;

    std::string corpus_path;
    std::string world_path;
    std::string whitelist_path;
    std::string blacklist_path;
    std::string rules_path;
    std::string stats_path;
    std::string output_path;

    CostModel cost_model() const {
        CostModel m = CostModel::named(profile);
        if (session_setup_s) m.session_setup = seconds_to_micros(*session_setup_s);
        if (per_command_s) m.per_command = seconds_to_micros(*per_command_s);
        if (per_byte_s) m.per_byte = seconds_to_micros(*per_byte_s);
        if (filter_cost_s) m.filter_cost = seconds_to_micros(*filter_cost_s);
        return m;
    }

    void set(const std::string& key, const std::string& value) {
        auto as_double = [&] {
            try {
                std::size_t used = 0;
                double v = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("bad numeric value for " + key + ": " + value);
            }
        };
        auto as_bool = [&] {
            if (value == "true" || value == "on" || value == "1") return true;
            if (value == "false" || value == "off" || value == "0") return false;
            throw ConfigError("bad boolean value for " + key + ": " + value);
        };
        auto as_count = [&] {
            double v = as_double();
            if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
                throw ConfigError("bad count for " + key + ": " + value);
            return static_cast<std::uint64_t>(v);
        };

        PipelineConfig& p = context.pipeline;
        if (key == "profile") {
            CostModel::named(value);  // validate
            profile = value;
        } else if (key == "session_setup_s") {
            session_setup_s = as_double();
        } else if (key == "per_command_s") {
            per_command_s = as_double();
        } else if (key == "per_byte_s") {
            per_byte_s = as_double();
        } else if (key == "filter_cost_s") {
            filter_cost_s = as_double();
        } else if (key == "whitelist_enabled") {
            p.whitelist_enabled = as_bool();
        } else if (key == "blacklist_enabled") {
            p.blacklist_enabled = as_bool();
        } else if (key == "greylist_enabled") {
            p.greylist_enabled = as_bool();
        } else if (key == "content_enabled") {
            p.content_enabled = as_bool();
        } else if (key == "rules_enabled") {
            p.rules_enabled = as_bool();
        } else if (key == "counter_enabled") {
            p.counter_enabled = as_bool();
        } else if (key == "reverse_lookup_enabled") {
            p.reverse_lookup_enabled = as_bool();
        } else if (key == "reverse_mode") {
            if (value == "strict")
                p.reverse_mode = ReverseMode::Strict;
            else if (value == "lenient")
                p.reverse_mode = ReverseMode::Lenient;
            else
                throw ConfigError("reverse_mode must be strict or lenient");
        } else if (key == "whitelist_skips_content") {
            p.whitelist_skips_content = as_bool();
        } else if (key == "bayes_threshold") {
            p.bayes_threshold = as_double();
        } else if (key == "bayes_p_unknown") {
            p.bayes.p_unknown = as_double();
        } else if (key == "bayes_clamp_floor") {
            p.bayes.clamp_floor = as_double();
        } else if (key == "bayes_clamp_ceil") {
            p.bayes.clamp_ceil = as_double();
        } else if (key == "bayes_top_n") {
            p.bayes.top_n = static_cast<std::size_t>(as_count());
        } else if (key == "greylist_min_delay_s") {
            context.greylist_min_delay = seconds_to_micros(as_double());
        } else if (key == "greylist_max_lifetime_s") {
            context.greylist_max_lifetime = seconds_to_micros(as_double());
        } else if (key == "counter_limit") {
            context.counter_limit = as_count();
        } else if (key == "counter_window_s") {
            context.counter_window = seconds_to_micros(as_double());
        } else if (key == "blocked_to_spam_folder") {
            context.blocked_to_spam_folder = as_bool();
        } else if (key == "corpus") {
            corpus_path = value;
        } else if (key == "world") {
            world_path = value;
        } else if (key == "whitelist") {
            whitelist_path = value;
        } else if (key == "blacklist") {
            blacklist_path = value;
        } else if (key == "rules") {
            rules_path = value;
        } else if (key == "stats") {
            stats_path = value;
        } else if (key == "output") {
            output_path = value;
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }

    void load(std::istream& in, const std::string& origin) {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto b = line.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            auto trim = [](std::string s) {
                auto i = s.find_first_not_of(" \t");
                auto j = s.find_last_not_of(" \t");
                return i == std::string::npos ? std::string() : s.substr(i, j - i + 1);
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) +
                                               ": empty key");
            try {
                set(key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path);
        load(in, path);
    }
};

}  // namespace spamsim

#endif  // SPAMSIM_CONFIG_HPP
