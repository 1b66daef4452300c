#ifndef SPAMSIM_FILTERS_HPP
#define SPAMSIM_FILTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spamsim/dns.hpp"
#include "spamsim/message.hpp"
#include "spamsim/time.hpp"

namespace spamsim {

// ---------------------------------------------------------------------------
// Address lists (whitelist / blacklist)

// A list key is either a full address, a bare domain, or an IPv4 address.
// Membership is exact on the normalized key, no wildcards.
class AddressList {
public:
    void add_address(const EmailAddress& a) { addresses_.insert(a.key()); }
    void add_domain(const std::string& d) { domains_.insert(ascii_lower(d)); }
    void add_ip(const IpAddress& ip) { ips_.insert(ip); }

    // Classifies a raw key line: IP if it parses as dotted quad, address if it
    // has an '@', otherwise a domain (which must contain a dot).
    void add_key(const std::string& raw) {
        bool ip_shaped = !raw.empty() && raw.find_first_not_of("0123456789.") ==
                                             std::string::npos;
        if (ip_shaped) {
            auto ip = IpAddress::try_parse(raw);
            if (!ip) throw std::runtime_error("malformed IPv4 list key: " + raw);
            ips_.insert(*ip);
        } else if (raw.find('@') != std::string::npos) {
            addresses_.insert(EmailAddress::parse(raw).key());
        } else {
            if (raw.find('.') == std::string::npos || raw.find_first_of(" \t") != std::string::npos)
                throw std::runtime_error("bad list key: " + raw);
            domains_.insert(ascii_lower(raw));
        }
    }

    bool contains_address(const EmailAddress& a) const { return addresses_.count(a.key()) > 0; }
    bool contains_domain(const std::string& d) const { return domains_.count(ascii_lower(d)) > 0; }
    bool contains_ip(const IpAddress& ip) const { return ips_.count(ip) > 0; }

    bool empty() const { return addresses_.empty() && domains_.empty() && ips_.empty(); }

    // sorted normalized keys, one per kind bucket; used for persistence
    std::vector<std::string> keys() const {
        std::vector<std::string> out(addresses_.begin(), addresses_.end());
        out.insert(out.end(), domains_.begin(), domains_.end());
        for (const auto& ip : ips_) out.push_back(ip.render());
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const AddressList& a, const AddressList& b) {
        return a.addresses_ == b.addresses_ && a.domains_ == b.domains_ && a.ips_ == b.ips_;
    }

private:
    std::set<std::string> addresses_;
    std::set<std::string> domains_;
    std::set<IpAddress> ips_;
};

enum class ListResult { Hit, Miss };

inline ListResult whitelist_check(const EmailAddress& from, const AddressList& list) {
    if (list.contains_address(from) || list.contains_domain(from.domain()))
        return ListResult::Hit;
    return ListResult::Miss;
}

inline ListResult blacklist_check(const IpAddress& ip, const std::string& domain,
                                  const AddressList& list) {
    if (list.contains_ip(ip) || list.contains_domain(domain)) return ListResult::Hit;
    return ListResult::Miss;
}

// ---------------------------------------------------------------------------
// Greylist

struct GreylistKey {
    IpAddress sender_ip;
    EmailAddress from;
    EmailAddress rcpt;

    friend bool operator<(const GreylistKey& a, const GreylistKey& b) {
        if (a.sender_ip != b.sender_ip) return a.sender_ip < b.sender_ip;
        if (a.from != b.from) return a.from < b.from;
        return a.rcpt < b.rcpt;
    }
};

enum class GreylistResult { TempReject, Pass };

class GreylistState {
public:
    GreylistState(Micros min_delay, Micros max_lifetime)
        : min_delay_(min_delay), max_lifetime_(max_lifetime) {}
    GreylistState() : GreylistState(seconds_to_micros(120), seconds_to_micros(86400)) {}

    Micros min_delay() const { return min_delay_; }
    Micros max_lifetime() const { return max_lifetime_; }

    GreylistResult check(const GreylistKey& key, Micros now) {
        auto it = entries_.find(key);
        if (it == entries_.end() || now - it->second.first_seen > max_lifetime_) {
            entries_[key] = Entry{now, false};  // expired entries behave as absent
            return GreylistResult::TempReject;
        }
        Entry& e = it->second;
        if (e.accepted) return GreylistResult::Pass;
        if (now - e.first_seen >= min_delay_) {
            e.accepted = true;
            return GreylistResult::Pass;
        }
        return GreylistResult::TempReject;  // retried too early, first_seen unchanged
    }

    void purge(Micros now) {
        for (auto it = entries_.begin(); it != entries_.end();)
            it = (now - it->second.first_seen > max_lifetime_) ? entries_.erase(it)
                                                               : std::next(it);
    }

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        Micros first_seen;
        bool accepted;
    };
    Micros min_delay_;
    Micros max_lifetime_;
    std::map<GreylistKey, Entry> entries_;
};

inline GreylistResult greylist_check(const GreylistKey& key, Micros now, GreylistState& state) {
    return state.check(key, now);
}

// ---------------------------------------------------------------------------
// Bayesian content filter

// tokens are case-folded maximal runs of letters/digits, length >= 3
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 3) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cur += static_cast<char>(std::tolower(c));
        else
            flush();
    }
    flush();
    return out;
}

// token set of subject + body, sorted and unique
inline std::vector<std::string> message_tokens(const EmailMessage& msg) {
    auto toks = tokenize(msg.subject);
    auto body = tokenize(msg.body);
    toks.insert(toks.end(), body.begin(), body.end());
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    return toks;
}

struct TokenCounts {
    std::uint64_t spam_count = 0;
    std::uint64_t ham_count = 0;
};

struct TokenStats {
    std::map<std::string, TokenCounts> tokens;
    std::uint64_t spam_msgs = 0;
    std::uint64_t ham_msgs = 0;
};

struct BayesParams {
    double p_unknown = 0.4;
    double clamp_floor = 0.01;
    double clamp_ceil = 0.99;
    std::size_t top_n = 15;
};

struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("training corpus is empty") {}
};

enum class Label { Spam, Ham };

// A token counts once per message (presence, not frequency).
inline TokenStats bayes_train(const std::vector<std::pair<EmailMessage, Label>>& corpus) {
    if (corpus.empty()) throw EmptyCorpus();
    TokenStats stats;
    for (const auto& [msg, label] : corpus) {
        bool spam = label == Label::Spam;
        (spam ? stats.spam_msgs : stats.ham_msgs) += 1;
        for (const auto& t : message_tokens(msg)) {
            auto& c = stats.tokens[t];
            (spam ? c.spam_count : c.ham_count) += 1;
        }
    }
    return stats;
}

inline void merge_stats(TokenStats& into, const TokenStats& other) {
    into.spam_msgs += other.spam_msgs;
    into.ham_msgs += other.ham_msgs;
    for (const auto& [t, c] : other.tokens) {
        auto& d = into.tokens[t];
        d.spam_count += c.spam_count;
        d.ham_count += c.ham_count;
    }
}

inline double token_spam_probability(const std::string& token, const TokenStats& stats,
                                     const BayesParams& params) {
    auto it = stats.tokens.find(token);
    if (it == stats.tokens.end()) return params.p_unknown;
    double spam_freq = stats.spam_msgs ? static_cast<double>(it->second.spam_count) /
                                             static_cast<double>(stats.spam_msgs)
                                       : 0.0;
    double ham_freq = stats.ham_msgs ? static_cast<double>(it->second.ham_count) /
                                           static_cast<double>(stats.ham_msgs)
                                     : 0.0;
    if (spam_freq + ham_freq == 0.0) return params.p_unknown;
    double p = spam_freq / (spam_freq + ham_freq);
    return std::clamp(p, params.clamp_floor, params.clamp_ceil);
}

// Ham-side probability computed with the same division as the spam side, so
// that tokens with mirrored counts yield exactly swapped (p, 1-p) pairs and
// symmetric messages score exactly 0.5 even in floating point.
inline double token_ham_probability(const std::string& token, const TokenStats& stats,
                                    const BayesParams& params) {
    auto it = stats.tokens.find(token);
    if (it == stats.tokens.end()) return 1.0 - params.p_unknown;
    double spam_freq = stats.spam_msgs ? static_cast<double>(it->second.spam_count) /
                                             static_cast<double>(stats.spam_msgs)
                                       : 0.0;
    double ham_freq = stats.ham_msgs ? static_cast<double>(it->second.ham_count) /
                                           static_cast<double>(stats.ham_msgs)
                                     : 0.0;
    if (spam_freq + ham_freq == 0.0) return 1.0 - params.p_unknown;
    double q = ham_freq / (spam_freq + ham_freq);
    return std::clamp(q, params.clamp_floor, params.clamp_ceil);
}

// Combines the top_n tokens with |p - 0.5| largest (ties broken by token
// order) as P = prod(p) / (prod(p) + prod(1-p)). Empty token set scores 0.5.
inline double bayes_score(const EmailMessage& msg, const TokenStats& stats,
                          const BayesParams& params = {}) {
    auto toks = message_tokens(msg);
    if (toks.empty()) return 0.5;
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(toks.size());
    for (auto& t : toks) scored.emplace_back(token_spam_probability(t, stats, params), t);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        double da = std::abs(a.first - 0.5), db = std::abs(b.first - 0.5);
        if (da != db) return da > db;
        return a.second < b.second;
    });
    if (scored.size() > params.top_n) scored.resize(params.top_n);
    double prod_p = 1.0, prod_q = 1.0;
    for (const auto& [p, t] : scored) {
        prod_p *= p;
        prod_q *= token_ham_probability(t, stats, params);
    }
    return prod_p / (prod_p + prod_q);
}

// ---------------------------------------------------------------------------
// Rule-based filter

enum class RuleField { Subject, Body, FromDomain, Helo };
enum class RuleAction { Pass, Block };

struct Rule {
    RuleField field;
    std::string pattern;  // literal substring, matched case-insensitively
    RuleAction action;
};

using RuleSet = std::vector<Rule>;

struct RuleMatch {
    RuleAction action = RuleAction::Pass;
    int index = -1;  // -1 when no rule matched (default Pass)
};

inline RuleMatch rules_apply(const EmailMessage& msg, const RuleSet& rules) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const Rule& r = rules[i];
        const std::string* field = nullptr;
        std::string tmp;
        switch (r.field) {
            case RuleField::Subject: tmp = ascii_lower(msg.subject); break;
            case RuleField::Body: tmp = ascii_lower(msg.body); break;
            case RuleField::FromDomain: tmp = msg.from.domain(); break;
            case RuleField::Helo: tmp = ascii_lower(msg.helo_domain); break;
        }
        field = &tmp;
        if (field->find(ascii_lower(r.pattern)) != std::string::npos)
            return RuleMatch{r.action, static_cast<int>(i)};
    }
    return RuleMatch{};
}

// ---------------------------------------------------------------------------
// Reverse (PTR) lookup

enum class ReverseMode { Strict, Lenient };
enum class ReverseResult { Pass, Block };

// Pass if a PTR record exists and equals the HELO domain or is a parent of
// it. A miss blocks in strict mode and passes in lenient mode (mobile-client
// friendly).
inline ReverseResult reverse_lookup_check(const IpAddress& ip, const std::string& helo_domain,
                                          const DnsDirectory& dns, ReverseMode mode) {
    auto ptr = dns_reverse(ip, dns);
    bool ok = false;
    if (ptr) {
        std::string helo = ascii_lower(helo_domain);
        ok = (*ptr == helo) ||
             (helo.size() > ptr->size() &&
              helo.compare(helo.size() - ptr->size() - 1, ptr->size() + 1, "." + *ptr) == 0);
    }
    if (ok) return ReverseResult::Pass;
    return mode == ReverseMode::Strict ? ReverseResult::Block : ReverseResult::Pass;
}

// ---------------------------------------------------------------------------
// Counter technique (outbound per-client rate limit)

enum class CounterResult { Pass, Block };

class CounterState {
public:
    CounterState(std::uint64_t limit, Micros window)
        : limit_(limit), window_(window) {}
    CounterState() : CounterState(100, seconds_to_micros(3600)) {}

    std::uint64_t limit() const { return limit_; }
    Micros window() const { return window_; }

    // Prunes sends older than the window, then admits iff the retained count
    // is below the limit. Blocked sends are not recorded.
    CounterResult check(const IpAddress& client, Micros now) {
        auto& sends = sends_[client];
        while (!sends.empty() && sends.front() <= now - window_) sends.pop_front();
        if (sends.size() < limit_) {
            sends.push_back(now);
            return CounterResult::Pass;
        }
        return CounterResult::Block;
    }

private:
    std::uint64_t limit_;
    Micros window_;
    std::map<IpAddress, std::deque<Micros>> sends_;
};

inline CounterResult counter_check(const IpAddress& client, Micros now, CounterState& state) {
    return state.check(client, now);
}

}  // namespace spamsim

#endif  // SPAMSIM_FILTERS_HPP
