#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "spamsim/corpus.hpp"

using namespace spamsim;

TEST_CASE("generation is deterministic in its params") {
    GeneratorParams p;
    p.seed = 7;
    p.count = 50;
    p.spam_ratio = 0.5;
    p.distinct_spam_bodies = 3;
    std::ostringstream a, b;
    save_corpus(generate_corpus(p), a);
    save_corpus(generate_corpus(p), b);
    CHECK(a.str() == b.str());

    p.seed = 8;
    std::ostringstream c;
    save_corpus(generate_corpus(p), c);
    CHECK(a.str() != c.str());
}

TEST_CASE("generation honors spam ratio and distinct bodies") {
    GeneratorParams p;
    p.seed = 1;
    p.count = 1000;
    p.spam_ratio = 1.0;
    p.distinct_spam_bodies = 1;
    auto blast = generate_corpus(p);
    REQUIRE(blast.size() == 1000);
    std::set<ContentDigest> digests;
    for (const auto& rec : blast) {
        CHECK(rec.label == Label::Spam);
        digests.insert(content_digest(rec.msg));
    }
    CHECK(digests.size() == 1);

    p.spam_ratio = 0.0;
    for (const auto& rec : generate_corpus(p)) CHECK(rec.label == Label::Ham);

    p.spam_ratio = 0.3;
    p.distinct_spam_bodies = 10;
    auto mixed = generate_corpus(p);
    std::size_t spam = 0;
    std::set<ContentDigest> spam_digests;
    for (const auto& rec : mixed)
        if (rec.label == Label::Spam) {
            ++spam;
            spam_digests.insert(content_digest(rec.msg));
        }
    CHECK(spam == 300);
    CHECK(spam_digests.size() == 10);
}

TEST_CASE("generation validates its params") {
    GeneratorParams p;
    p.count = 0;
    CHECK_THROWS_AS(generate_corpus(p), InvalidParams);
    p = {};
    p.spam_ratio = 1.5;
    CHECK_THROWS_AS(generate_corpus(p), InvalidParams);
    p = {};
    p.count = 10;
    p.spam_ratio = 0.5;
    p.distinct_spam_bodies = 6;  // more templates than spam messages
    CHECK_THROWS_AS(generate_corpus(p), InvalidParams);
    p = {};
    p.body_max_words = 0;
    CHECK_THROWS_AS(generate_corpus(p), InvalidParams);
}

TEST_CASE("corpus save/load round-trips byte-identically") {
    GeneratorParams p;
    p.seed = 3;
    p.count = 40;
    p.spam_ratio = 0.4;
    p.distinct_spam_bodies = 2;
    p.rcpt_per_message = 3;
    auto corpus = generate_corpus(p);

    std::ostringstream first;
    save_corpus(corpus, first);
    std::istringstream in(first.str());
    auto reloaded = load_corpus(in);
    std::ostringstream second;
    save_corpus(reloaded, second);
    CHECK(first.str() == second.str());
    REQUIRE(reloaded.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(reloaded[i].msg.id == corpus[i].msg.id);
        CHECK(reloaded[i].msg.size_bytes == corpus[i].msg.size_bytes);
        CHECK(reloaded[i].label == corpus[i].label);
    }
}

TEST_CASE("corpus loader names the offending line") {
    std::string good =
        R"({"body":"b","from":"a@b.co","helo":"h.example","id":"m0","label":"ham","rcpt":"c@d.co","retry":"none","sender_ip":"1.2.3.4","subject":"s","submitted_at":0.0})";
    std::string no_rcpt =
        R"({"body":"b","from":"a@b.co","helo":"h.example","id":"m1","label":"ham","rcpt":"","retry":"none","sender_ip":"1.2.3.4","subject":"s","submitted_at":0.0})";
    std::istringstream in(good + "\n" + no_rcpt + "\n");
    try {
        load_corpus(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    std::istringstream garbage("not json\n");
    CHECK_THROWS_AS(load_corpus(garbage), ParseError);

    std::istringstream bad_ip(
        R"({"body":"b","from":"a@b.co","helo":"h.example","id":"m0","label":"ham","rcpt":"c@d.co","retry":"none","sender_ip":"300.1.1.1","subject":"s","submitted_at":0.0})");
    CHECK_THROWS_AS(load_corpus(bad_ip), ParseError);
}

TEST_CASE("missing files raise IoError") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
    CHECK_THROWS_AS(load_list("/nonexistent/list.txt"), IoError);
    CHECK_THROWS_AS(load_stats("/nonexistent/stats.tsv"), IoError);
}

TEST_CASE("list files skip comments, blanks, and duplicates") {
    std::istringstream in("#comment\n\n10.0.0.5\n10.0.0.5\n  spam.example  \na@b.co\n");
    auto list = load_list(in);
    CHECK(list.contains_ip(IpAddress::parse("10.0.0.5")));
    CHECK(list.contains_domain("spam.example"));
    CHECK(list.contains_address(parse_address("A@b.co")));
    CHECK(list.keys().size() == 3);
}

TEST_CASE("list loader rejects malformed ip-like keys") {
    // all-digits-and-dots keys must be valid dotted quads
    std::istringstream in("300.1.1.1\n");
    CHECK_THROWS_AS(load_list(in), ParseError);

    std::istringstream bad("not a key\n");
    CHECK_THROWS_AS(load_list(bad), ParseError);
}

TEST_CASE("list save/load round-trips") {
    AddressList list;
    list.add_key("10.0.0.5");
    list.add_key("spam.example");
    list.add_key("Bob@mail.example");
    std::ostringstream out;
    save_list(list, out);
    std::istringstream in(out.str());
    CHECK(load_list(in) == list);
}

TEST_CASE("rule files round-trip and validate") {
    std::istringstream in("subject\tfree money\tblock\nbody\tnewsletter\tpass\n");
    auto rules = load_rules(in);
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].field == RuleField::Subject);
    CHECK(rules[0].action == RuleAction::Block);
    std::ostringstream out;
    save_rules(rules, out);
    CHECK(out.str() == "subject\tfree money\tblock\nbody\tnewsletter\tpass\n");

    std::istringstream bad_field("header\tx\tblock\n");
    CHECK_THROWS_AS(load_rules(bad_field), ParseError);
    std::istringstream bad_action("subject\tx\tdelete\n");
    CHECK_THROWS_AS(load_rules(bad_action), ParseError);
    std::istringstream missing_tab("subject x block\n");
    CHECK_THROWS_AS(load_rules(missing_tab), ParseError);
}

TEST_CASE("token stats round-trip through their file format") {
    TokenStats stats;
    stats.spam_msgs = 10;
    stats.ham_msgs = 20;
    stats.tokens["free"] = TokenCounts{9, 1};
    stats.tokens["agenda"] = TokenCounts{0, 15};
    std::ostringstream out;
    save_stats(stats, out);
    std::istringstream in(out.str());
    auto loaded = load_stats(in);
    CHECK(loaded.spam_msgs == 10);
    CHECK(loaded.ham_msgs == 20);
    CHECK(loaded.tokens.at("free").spam_count == 9);
    CHECK(loaded.tokens.at("agenda").ham_count == 15);

    std::istringstream no_totals("free\t9\t1\n");
    CHECK_THROWS_AS(load_stats(no_totals), ParseError);
    std::istringstream overflow("totals\t1\t1\nfree\t9\t1\n");
    CHECK_THROWS_AS(load_stats(overflow), ParseError);
}
