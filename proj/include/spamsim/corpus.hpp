#ifndef SPAMSIM_CORPUS_HPP
#define SPAMSIM_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spamsim/filters.hpp"
#include "spamsim/message.hpp"

namespace spamsim {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class RetryPolicy { None, RetryOnce };

struct CorpusRecord {
    EmailMessage msg;
    Label label = Label::Ham;
    RetryPolicy retry = RetryPolicy::None;
};

// ---------------------------------------------------------------------------
// Deterministic corpus generation

struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& what) : std::runtime_error(what) {}
};

struct GeneratorParams {
    std::uint64_t seed = 1;
    std::size_t count = 1000;
    double spam_ratio = 1.0;
    std::size_t distinct_spam_bodies = 1;
    std::size_t spam_vocab = 50;
    std::size_t ham_vocab = 200;
    std::size_t body_min_words = 8;
    std::size_t body_max_words = 40;
    std::size_t rcpt_per_message = 1;

    void validate() const {
        if (count < 1) throw InvalidParams("count must be >= 1");
        if (spam_ratio < 0.0 || spam_ratio > 1.0)
            throw InvalidParams("spam_ratio must be in [0,1]");
        std::size_t spam = spam_count();
        if (spam > 0 && (distinct_spam_bodies < 1 || distinct_spam_bodies > spam))
            throw InvalidParams("distinct_spam_bodies must be in [1, spam count]");
        if (body_min_words < 1 || body_max_words < body_min_words)
            throw InvalidParams("bad body length range");
        if (rcpt_per_message < 1) throw InvalidParams("rcpt_per_message must be >= 1");
        if (spam_vocab < 1 || ham_vocab < 1) throw InvalidParams("vocabulary must be non-empty");
    }

    std::size_t spam_count() const {
        return static_cast<std::size_t>(
            std::llround(static_cast<double>(count) * spam_ratio));
    }
};

namespace gen_detail {

inline std::string vocab_word(const char* prefix, std::size_t i) {
    return std::string(prefix) + std::to_string(i);
}

inline std::string random_body(std::mt19937_64& rng, const char* prefix, std::size_t vocab,
                               std::size_t min_words, std::size_t max_words) {
    std::uniform_int_distribution<std::size_t> len(min_words, max_words);
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    std::size_t n = len(rng);
    std::string body;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) body += ' ';
        body += vocab_word(prefix, word(rng));
    }
    return body;
}

}  // namespace gen_detail

// Seeded and pure in its params: the same GeneratorParams always produce the
// same records. Spam bodies are drawn from exactly distinct_spam_bodies
// templates so digest collisions are controlled.
inline std::vector<CorpusRecord> generate_corpus(const GeneratorParams& p) {
    p.validate();
    std::mt19937_64 rng(p.seed);
    std::size_t spam_left = p.spam_count();

    // spam body templates, fixed per template
    std::vector<std::string> templates;
    {
        std::mt19937_64 trng(p.seed ^ 0x9e3779b97f4a7c15ULL);
        for (std::size_t t = 0; t < p.distinct_spam_bodies; ++t)
            templates.push_back("offer " + std::to_string(t) + " " +
                                gen_detail::random_body(trng, "spamword", p.spam_vocab,
                                                        p.body_min_words, p.body_max_words));
    }

    // label sequence: spam first, then a seeded shuffle
    std::vector<bool> is_spam(p.count, false);
    for (std::size_t i = 0; i < spam_left; ++i) is_spam[i] = true;
    std::shuffle(is_spam.begin(), is_spam.end(), rng);

    std::vector<CorpusRecord> out;
    out.reserve(p.count);
    std::size_t spam_idx = 0;
    for (std::size_t i = 0; i < p.count; ++i) {
        CorpusRecord rec;
        bool spam = is_spam[i];
        std::string body, subject;
        IpAddress ip;
        EmailAddress from;
        if (spam) {
            std::size_t t = spam_idx++ % p.distinct_spam_bodies;
            body = templates[t];
            subject = "free money now";
            ip = IpAddress(10, 0, 0, 2);
            from = EmailAddress("spammer", "bulk.example");
            rec.label = Label::Spam;
            rec.retry = RetryPolicy::None;  // spammers never retry
        } else {
            body = gen_detail::random_body(rng, "hamword", p.ham_vocab, p.body_min_words,
                                           p.body_max_words);
            subject = "note " + std::to_string(i);
            ip = IpAddress(10, 0, 0, static_cast<std::uint8_t>(10 + i % 5));
            from = EmailAddress("user" + std::to_string(i % 7), "sender.example");
            rec.label = Label::Ham;
            rec.retry = RetryPolicy::RetryOnce;
        }
        std::vector<EmailAddress> rcpt;
        for (std::size_t j = 0; j < p.rcpt_per_message; ++j)
            rcpt.emplace_back("rcpt" + std::to_string(i) + "x" + std::to_string(j),
                              "recipient.example");
        rec.msg = EmailMessage::make("m" + std::to_string(i), ip, "a.example", from,
                                     std::move(rcpt), subject, body,
                                     seconds_to_micros(static_cast<double>(i)));
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus persistence: JSON Lines, one record per line, keys sorted, '\n'
// line endings. save(load(f)) is byte-identical for files save() wrote.

inline nlohmann::json record_to_json(const CorpusRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.msg.id;
    j["sender_ip"] = rec.msg.sender_ip.render();
    j["helo"] = rec.msg.helo_domain;
    j["from"] = rec.msg.from.render();
    std::string rcpt;
    for (std::size_t i = 0; i < rec.msg.rcpt.size(); ++i) {
        if (i) rcpt += ',';
        rcpt += rec.msg.rcpt[i].render();
    }
    j["rcpt"] = rcpt;
    j["subject"] = rec.msg.subject;
    j["body"] = rec.msg.body;
    j["label"] = rec.label == Label::Spam ? "spam" : "ham";
    j["retry"] = rec.retry == RetryPolicy::RetryOnce ? "retry_once" : "none";
    j["submitted_at"] = micros_to_seconds(rec.msg.submitted_at);
    return j;
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

}  // namespace detail

inline CorpusRecord record_from_json(const nlohmann::json& j, int lineno) {
    try {
        CorpusRecord rec;
        std::string label = j.at("label").get<std::string>();
        if (label == "spam")
            rec.label = Label::Spam;
        else if (label == "ham")
            rec.label = Label::Ham;
        else
            throw std::runtime_error("unknown label: " + label);
        std::string retry = j.value("retry", "none");
        if (retry == "retry_once")
            rec.retry = RetryPolicy::RetryOnce;
        else if (retry == "none")
            rec.retry = RetryPolicy::None;
        else
            throw std::runtime_error("unknown retry policy: " + retry);
        std::vector<EmailAddress> rcpt;
        for (const auto& r : detail::split_list(j.at("rcpt").get<std::string>()))
            rcpt.push_back(EmailAddress::parse(r));
        rec.msg = EmailMessage::make(
            j.at("id").get<std::string>(), IpAddress::parse(j.at("sender_ip").get<std::string>()),
            j.at("helo").get<std::string>(), EmailAddress::parse(j.at("from").get<std::string>()),
            std::move(rcpt), j.at("subject").get<std::string>(), j.at("body").get<std::string>(),
            seconds_to_micros(j.at("submitted_at").get<double>()));
        return rec;
    } catch (const std::exception& e) {
        throw ParseError(lineno, e.what());
    }
}

inline void save_corpus(const std::vector<CorpusRecord>& records, std::ostream& out) {
    for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

inline void save_corpus(const std::vector<CorpusRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    save_corpus(records, out);
}

inline std::vector<CorpusRecord> load_corpus(std::istream& in) {
    std::vector<CorpusRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(lineno, "malformed JSON");
        out.push_back(record_from_json(j, lineno));
    }
    return out;
}

inline std::vector<CorpusRecord> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return load_corpus(in);
}

// ---------------------------------------------------------------------------
// Address-list files: one key per line, '#' comments and blanks ignored.

inline AddressList load_list(std::istream& in) {
    AddressList list;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // trim
        auto b = line.find_first_not_of(" \t");
        auto e = line.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        std::string key = line.substr(b, e - b + 1);
        if (key[0] == '#') continue;
        try {
            list.add_key(key);
        } catch (const std::exception& ex) {
            throw ParseError(lineno, ex.what());
        }
    }
    return list;
}

inline AddressList load_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    return load_list(in);
}

inline void save_list(const AddressList& list, std::ostream& out) {
    for (const auto& k : list.keys()) out << k << '\n';
}

inline void save_list(const AddressList& list, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    save_list(list, out);
}

// ---------------------------------------------------------------------------
// Rule files: field<TAB>pattern<TAB>action

inline RuleSet load_rules(std::istream& in) {
    RuleSet rules;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw ParseError(lineno, "expected field<TAB>pattern<TAB>action");
        std::string field = line.substr(0, t1);
        std::string pattern = line.substr(t1 + 1, t2 - t1 - 1);
        std::string action = line.substr(t2 + 1);
        Rule r;
        if (field == "subject")
            r.field = RuleField::Subject;
        else if (field == "body")
            r.field = RuleField::Body;
        else if (field == "from_domain")
            r.field = RuleField::FromDomain;
        else if (field == "helo")
            r.field = RuleField::Helo;
        else
            throw ParseError(lineno, "unknown rule field: " + field);
        if (action == "block")
            r.action = RuleAction::Block;
        else if (action == "pass")
            r.action = RuleAction::Pass;
        else
            throw ParseError(lineno, "unknown rule action: " + action);
        if (pattern.empty()) throw ParseError(lineno, "empty rule pattern");
        r.pattern = pattern;
        rules.push_back(std::move(r));
    }
    return rules;
}

inline RuleSet load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    return load_rules(in);
}

inline void save_rules(const RuleSet& rules, std::ostream& out) {
    for (const auto& r : rules) {
        const char* field = r.field == RuleField::Subject      ? "subject"
                            : r.field == RuleField::Body       ? "body"
                            : r.field == RuleField::FromDomain ? "from_domain"
                                                               : "helo";
        out << field << '\t' << r.pattern << '\t'
            << (r.action == RuleAction::Block ? "block" : "pass") << '\n';
    }
}

inline void save_rules(const RuleSet& rules, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    save_rules(rules, out);
}

// ---------------------------------------------------------------------------
// Token statistics: a totals header line then token<TAB>spam<TAB>ham rows.

inline void save_stats(const TokenStats& stats, std::ostream& out) {
    out << "totals\t" << stats.spam_msgs << '\t' << stats.ham_msgs << '\n';
    for (const auto& [token, c] : stats.tokens)
        out << token << '\t' << c.spam_count << '\t' << c.ham_count << '\n';
}

inline void save_stats(const TokenStats& stats, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    save_stats(stats, out);
}

inline TokenStats load_stats(std::istream& in) {
    TokenStats stats;
    std::string line;
    int lineno = 0;
    bool saw_totals = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw ParseError(lineno, "expected three TAB fields");
        std::string name = line.substr(0, t1);
        std::uint64_t a, b;
        try {
            a = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
            b = std::stoull(line.substr(t2 + 1));
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad count");
        }
        if (!saw_totals) {
            if (name != "totals") throw ParseError(lineno, "first line must be totals");
            stats.spam_msgs = a;
            stats.ham_msgs = b;
            saw_totals = true;
        } else {
            if (a > stats.spam_msgs || b > stats.ham_msgs)
                throw ParseError(lineno, "token count exceeds totals");
            stats.tokens[name] = TokenCounts{a, b};
        }
    }
    if (!saw_totals) throw ParseError(lineno ? lineno : 1, "missing totals line");
    return stats;
}

inline TokenStats load_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    return load_stats(in);
}

// labeled view for training
inline std::vector<std::pair<EmailMessage, Label>> training_view(
    const std::vector<CorpusRecord>& corpus) {
    std::vector<std::pair<EmailMessage, Label>> out;
    out.reserve(corpus.size());
    for (const auto& rec : corpus) out.emplace_back(rec.msg, rec.label);
    return out;
}

}  // namespace spamsim

#endif  // SPAMSIM_CORPUS_HPP
