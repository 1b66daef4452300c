#ifndef SPAMSIM_PIPELINE_HPP
#define SPAMSIM_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamsim/dns.hpp"
#include "spamsim/filters.hpp"
#include "spamsim/message.hpp"

namespace spamsim {

enum class Mount { SenderSide, ReceiverSide };

struct PipelineConfig {
    // SenderAuth and ReceiverIdent are the pipeline skeleton and cannot be
    // turned off.
    bool counter_enabled = false;
    bool whitelist_enabled = true;
    bool blacklist_enabled = true;
    bool greylist_enabled = true;
    bool content_enabled = true;
    bool rules_enabled = true;

    bool reverse_lookup_enabled = false;
    ReverseMode reverse_mode = ReverseMode::Lenient;

    double bayes_threshold = 0.9;
    BayesParams bayes;

    bool dedup_enabled = false;
    bool whitelist_skips_content = false;
    Mount mount = Mount::ReceiverSide;
};

// One mounted filter set plus its mutable state. Owned by a single simulated
// server and driven from one logical thread.
struct FilterContext {
    std::set<IpAddress> client_directory;
    AddressList whitelist;
    AddressList blacklist;
    GreylistState greylist;
    TokenStats stats;
    RuleSet rules;
    CounterState counter;
    // content-determined verdicts only (ContentFilter/RuleFilter outcome),
    // never recipient-dependent ones
    std::map<ContentDigest, Verdict> dedup_cache;
    PipelineConfig config;
    const DnsDirectory* dns = nullptr;

    // accounting, read by the simulator to charge filter cost
    std::uint64_t content_executions = 0;
    std::uint64_t cache_hits = 0;
};

enum class AuthResult { Ok, Terminate };

inline AuthResult authenticate_sender(const EmailMessage& msg, FilterContext& ctx) {
    if (ctx.client_directory.count(msg.sender_ip) == 0) return AuthResult::Terminate;
    if (ctx.config.reverse_lookup_enabled && ctx.dns) {
        if (reverse_lookup_check(msg.sender_ip, msg.helo_domain, *ctx.dns,
                                 ctx.config.reverse_mode) == ReverseResult::Block)
            return AuthResult::Terminate;
    }
    return AuthResult::Ok;
}

enum class IdentResult { Ok, Failure };

inline IdentResult identify_receiver(const EmailAddress& rcpt, const DnsDirectory& dns) {
    return dns_resolve(rcpt.domain(), dns) ? IdentResult::Ok : IdentResult::Failure;
}

namespace detail {

// ContentFilter then RuleFilter, uncached. The verdict depends only on
// message content fields, which is what makes it safe to key by digest.
inline Verdict content_stages(const EmailMessage& msg, FilterContext& ctx) {
    ctx.content_executions += 1;
    if (ctx.config.content_enabled) {
        double score = bayes_score(msg, ctx.stats, ctx.config.bayes);
        if (score >= ctx.config.bayes_threshold)
            return Verdict::block(Stage::ContentFilter,
                                  "bayes score " + std::to_string(score));
    }
    if (ctx.config.rules_enabled) {
        RuleMatch m = rules_apply(msg, ctx.rules);
        if (m.index >= 0 && m.action == RuleAction::Block)
            return Verdict::block(Stage::RuleFilter, "rule " + std::to_string(m.index));
    }
    return Verdict::pass();
}

}  // namespace detail

struct FilterOnceResult {
    Verdict verdict;
    bool cache_hit = false;
};

// Runs the content stages once per distinct digest; later identical bodies
// reuse the cached verdict at zero filter cost.
inline FilterOnceResult filter_once(const EmailMessage& msg, FilterContext& ctx) {
    ContentDigest digest = content_digest(msg);
    auto it = ctx.dedup_cache.find(digest);
    if (it != ctx.dedup_cache.end()) {
        ctx.cache_hits += 1;
        return {it->second, true};
    }
    Verdict v = detail::content_stages(msg, ctx);
    ctx.dedup_cache.emplace(std::move(digest), v);
    return {v, false};
}

// One full pipeline execution for one (message, recipient) pair. `now` is the
// message-time axis driving greylist/counter state; cost accounting lives in
// the simulator. `trace`, when given, records every stage entered.
inline Verdict run_pipeline(const EmailMessage& msg, const EmailAddress& rcpt, Micros now,
                            FilterContext& ctx, std::vector<Stage>* trace = nullptr) {
    auto enter = [&](Stage s) {
        if (trace) trace->push_back(s);
    };

    enter(Stage::SenderAuth);
    if (authenticate_sender(msg, ctx) == AuthResult::Terminate)
        return Verdict::block(Stage::SenderAuth, "sender not authorized");

    if (ctx.config.counter_enabled && ctx.config.mount == Mount::SenderSide) {
        enter(Stage::CounterCheck);
        if (counter_check(msg.sender_ip, now, ctx.counter) == CounterResult::Block)
            return Verdict::block(Stage::CounterCheck, "send-rate limit exceeded");
    }

    enter(Stage::ReceiverIdent);
    if (!ctx.dns || identify_receiver(rcpt, *ctx.dns) == IdentResult::Failure)
        return Verdict::failure_to_sender("recipient domain does not resolve: " +
                                          rcpt.domain());

    bool whitelisted = false;
    if (ctx.config.whitelist_enabled) {
        enter(Stage::WhitelistCheck);
        whitelisted = whitelist_check(msg.from, ctx.whitelist) == ListResult::Hit;
    }

    // a whitelist hit bypasses blacklist and greylist; content checks still
    // run unless explicitly configured away
    if (!whitelisted) {
        if (ctx.config.blacklist_enabled) {
            enter(Stage::BlacklistCheck);
            if (blacklist_check(msg.sender_ip, msg.from.domain(), ctx.blacklist) ==
                ListResult::Hit)
                return Verdict::block(Stage::BlacklistCheck, "sender blacklisted");
        }
        if (ctx.config.greylist_enabled) {
            enter(Stage::GreylistCheck);
            GreylistKey key{msg.sender_ip, msg.from, rcpt};
            if (greylist_check(key, now, ctx.greylist) == GreylistResult::TempReject)
                return Verdict::temp_reject("greylisted, retry later");
        }
    }

    bool skip_content = whitelisted && ctx.config.whitelist_skips_content;
    if (!skip_content && (ctx.config.content_enabled || ctx.config.rules_enabled)) {
        enter(Stage::ContentFilter);
        Verdict v;
        if (ctx.config.dedup_enabled) {
            v = filter_once(msg, ctx).verdict;
        } else {
            v = detail::content_stages(msg, ctx);
        }
        if (v.decision != Decision::Pass) {
            if (trace && v.stage == Stage::RuleFilter) enter(Stage::RuleFilter);
            return v;
        }
        if (trace && ctx.config.rules_enabled) enter(Stage::RuleFilter);
    }

    enter(Stage::Forwarded);
    return Verdict::pass();
}

}  // namespace spamsim

#endif  // SPAMSIM_PIPELINE_HPP
