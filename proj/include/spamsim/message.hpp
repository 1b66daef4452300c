#ifndef SPAMSIM_MESSAGE_HPP
#define SPAMSIM_MESSAGE_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spamsim/time.hpp"

namespace spamsim {

struct MalformedAddress : std::runtime_error {
    explicit MalformedAddress(const std::string& what) : std::runtime_error(what) {}
};

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// local part keeps its original casing for display; comparisons case-fold both
// parts. domain is stored lowercase.
class EmailAddress {
public:
    EmailAddress() = default;
    EmailAddress(std::string local, std::string domain)
        : local_(std::move(local)), domain_(ascii_lower(domain)) {
        validate();
    }

    static EmailAddress parse(std::string_view text) {
        auto at = text.find('@');
        if (at == std::string_view::npos)
            throw MalformedAddress("address has no '@': " + std::string(text));
        if (text.find('@', at + 1) != std::string_view::npos)
            throw MalformedAddress("address has multiple '@': " + std::string(text));
        return EmailAddress(std::string(text.substr(0, at)), std::string(text.substr(at + 1)));
    }

    const std::string& local() const { return local_; }
    const std::string& domain() const { return domain_; }

    std::string render() const { return local_ + "@" + domain_; }

    // case-folded form used for list keys and equality
    std::string key() const { return ascii_lower(local_) + "@" + domain_; }

    friend bool operator==(const EmailAddress& a, const EmailAddress& b) {
        return ascii_lower(a.local_) == ascii_lower(b.local_) && a.domain_ == b.domain_;
    }
    friend bool operator!=(const EmailAddress& a, const EmailAddress& b) { return !(a == b); }
    friend bool operator<(const EmailAddress& a, const EmailAddress& b) {
        return a.key() < b.key();
    }

private:
    void validate() const {
        if (local_.empty() || domain_.empty())
            throw MalformedAddress("empty local or domain part");
        auto bad = [](const std::string& s) {
            return s.find('@') != std::string::npos ||
                   std::any_of(s.begin(), s.end(),
                               [](unsigned char c) { return std::isspace(c); });
        };
        if (bad(local_) || bad(domain_))
            throw MalformedAddress("whitespace or '@' inside address part");
        auto dot = domain_.find('.');
        if (dot == std::string::npos || dot == 0 || dot == domain_.size() - 1)
            throw MalformedAddress("domain needs an interior dot: " + domain_);
    }

    std::string local_;
    std::string domain_;
};

class IpAddress {
public:
    IpAddress() : octets_{0, 0, 0, 0} {}
    IpAddress(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : octets_{a, b, c, d} {}

    static std::optional<IpAddress> try_parse(std::string_view text) {
        std::array<std::uint8_t, 4> oct{};
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
            std::size_t start = pos;
            long v = 0;
            int digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                v = v * 10 + (text[pos] - '0');
                ++pos;
                if (++digits > 3) return std::nullopt;
            }
            if (digits == 0 || v > 255) return std::nullopt;
            (void)start;
            oct[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
            if (i < 3) {
                if (pos >= text.size() || text[pos] != '.') return std::nullopt;
                ++pos;
            }
        }
        if (pos != text.size()) return std::nullopt;
        return IpAddress(oct[0], oct[1], oct[2], oct[3]);
    }

    static IpAddress parse(std::string_view text) {
        auto ip = try_parse(text);
        if (!ip) throw std::runtime_error("malformed IPv4 address: " + std::string(text));
        return *ip;
    }

    std::string render() const {
        return std::to_string(octets_[0]) + "." + std::to_string(octets_[1]) + "." +
               std::to_string(octets_[2]) + "." + std::to_string(octets_[3]);
    }

    friend bool operator==(const IpAddress& a, const IpAddress& b) {
        return a.octets_ == b.octets_;
    }
    friend bool operator!=(const IpAddress& a, const IpAddress& b) { return !(a == b); }
    friend bool operator<(const IpAddress& a, const IpAddress& b) {
        return a.octets_ < b.octets_;
    }

private:
    std::array<std::uint8_t, 4> octets_;
};

inline EmailAddress parse_address(std::string_view text) { return EmailAddress::parse(text); }

struct EmailMessage;

// Canonical wire encoding. Drives size accounting; not MIME.
inline std::string encode_message(const EmailMessage& msg);
inline std::size_t encoded_size(const EmailMessage& msg);

struct EmailMessage {
    std::string id;
    IpAddress sender_ip;
    std::string helo_domain;
    EmailAddress from;
    std::vector<EmailAddress> rcpt;  // non-empty, duplicate-free
    std::string subject;
    std::string body;
    std::size_t size_bytes = 0;
    Micros submitted_at = 0;

    static EmailMessage make(std::string id, IpAddress sender_ip, std::string helo,
                             EmailAddress from, std::vector<EmailAddress> rcpt,
                             std::string subject, std::string body, Micros submitted_at) {
        if (rcpt.empty()) throw std::runtime_error("message needs at least one recipient");
        for (std::size_t i = 0; i < rcpt.size(); ++i)
            for (std::size_t j = i + 1; j < rcpt.size(); ++j)
                if (rcpt[i] == rcpt[j])
                    throw std::runtime_error("duplicate recipient: " + rcpt[i].render());
        EmailMessage m{std::move(id), sender_ip,        std::move(helo),
                       std::move(from), std::move(rcpt), std::move(subject),
                       std::move(body), 0,               submitted_at};
        m.size_bytes = encoded_size(m);
        return m;
    }
};

inline std::string encode_message(const EmailMessage& msg) {
    std::string out = "FROM:" + msg.from.render() + "\nTO:";
    for (std::size_t i = 0; i < msg.rcpt.size(); ++i) {
        if (i) out += ',';
        out += msg.rcpt[i].render();
    }
    out += "\nSUBJECT:" + msg.subject + "\n\n" + msg.body;
    return out;
}

inline std::size_t encoded_size(const EmailMessage& msg) { return encode_message(msg).size(); }

namespace detail {

// 128-bit FNV-1a. Chosen for determinism; golden digests are frozen in the tests.
struct Fnv128 {
    unsigned __int128 state;

    Fnv128() {
        // offset basis 0x6c62272e07bb014262b821756295c58d
        state = (static_cast<unsigned __int128>(0x6c62272e07bb0142ULL) << 64) |
                0x62b821756295c58dULL;
    }

    void update(std::string_view data) {
        // prime 2^88 + 2^8 + 0x3b
        const unsigned __int128 prime =
            (static_cast<unsigned __int128>(0x0000000001000000ULL) << 64) | 0x000000000000013bULL;
        for (unsigned char c : data) {
            state ^= c;
            state *= prime;
        }
    }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(32, '0');
        unsigned __int128 v = state;
        for (int i = 31; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(v & 0xf)];
            v >>= 4;
        }
        return out;
    }
};

// case-fold, collapse whitespace runs to one space, trim
inline std::string normalize_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(c));
        }
    }
    return out;
}

}  // namespace detail

struct ContentDigest {
    std::string hex;  // 32 lowercase hex chars

    friend bool operator==(const ContentDigest& a, const ContentDigest& b) {
        return a.hex == b.hex;
    }
    friend bool operator<(const ContentDigest& a, const ContentDigest& b) {
        return a.hex < b.hex;
    }
};

// Depends only on normalized subject and body; recipients and sender never
// affect it, which is what lets a bulk blast share one cached verdict.
inline ContentDigest content_digest(const EmailMessage& msg) {
    detail::Fnv128 h;
    h.update(detail::normalize_text(msg.subject));
    h.update("\x1f");  // field separator, cannot appear in normalized text
    h.update(detail::normalize_text(msg.body));
    return ContentDigest{h.hex()};
}

enum class Stage {
    SenderAuth,
    CounterCheck,
    ReceiverIdent,
    WhitelistCheck,
    BlacklistCheck,
    GreylistCheck,
    ContentFilter,
    RuleFilter,
    Forwarded,
};

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::SenderAuth: return "SenderAuth";
        case Stage::CounterCheck: return "CounterCheck";
        case Stage::ReceiverIdent: return "ReceiverIdent";
        case Stage::WhitelistCheck: return "WhitelistCheck";
        case Stage::BlacklistCheck: return "BlacklistCheck";
        case Stage::GreylistCheck: return "GreylistCheck";
        case Stage::ContentFilter: return "ContentFilter";
        case Stage::RuleFilter: return "RuleFilter";
        case Stage::Forwarded: return "Forwarded";
    }
    return "?";
}

enum class Decision { Pass, Block, TempReject, FailureToSender };

inline const char* decision_name(Decision d) {
    switch (d) {
        case Decision::Pass: return "Pass";
        case Decision::Block: return "Block";
        case Decision::TempReject: return "TempReject";
        case Decision::FailureToSender: return "FailureToSender";
    }
    return "?";
}

struct Verdict {
    Decision decision = Decision::Pass;
    Stage stage = Stage::Forwarded;
    std::string reason;

    static Verdict pass() { return {Decision::Pass, Stage::Forwarded, "forwarded"}; }
    static Verdict block(Stage stage, std::string reason) {
        return {Decision::Block, stage, std::move(reason)};
    }
    static Verdict temp_reject(std::string reason) {
        return {Decision::TempReject, Stage::GreylistCheck, std::move(reason)};
    }
    static Verdict failure_to_sender(std::string reason) {
        return {Decision::FailureToSender, Stage::ReceiverIdent, std::move(reason)};
    }
};

}  // namespace spamsim

#endif  // SPAMSIM_MESSAGE_HPP
