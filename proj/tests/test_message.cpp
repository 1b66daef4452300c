#include <catch2/catch_amalgamated.hpp>

#include "spamsim/message.hpp"

using namespace spamsim;

namespace {

EmailMessage make_msg(std::string subject, std::string body,
                      std::vector<EmailAddress> rcpt = {EmailAddress::parse("c@d.co")}) {
    return EmailMessage::make("x", IpAddress(1, 2, 3, 4), "h.example",
                              EmailAddress::parse("a@b.co"), std::move(rcpt),
                              std::move(subject), std::move(body), 0);
}

}  // namespace

TEST_CASE("parse_address splits and normalizes") {
    auto a = parse_address("alice@example.com");
    CHECK(a.local() == "alice");
    CHECK(a.domain() == "example.com");
    CHECK(a.render() == "alice@example.com");
}

TEST_CASE("address comparison is case-insensitive in both parts") {
    CHECK(parse_address("Alice@EXAMPLE.COM") == parse_address("alice@example.com"));
    CHECK(parse_address("alice@example.com") != parse_address("bob@example.com"));

    // equivalence relation on a small universe
    std::vector<EmailAddress> addrs = {
        parse_address("a@x.co"), parse_address("A@x.co"), parse_address("A@X.CO"),
        parse_address("b@x.co"), parse_address("a@y.co")};
    for (const auto& p : addrs) {
        CHECK(p == p);
        for (const auto& q : addrs) {
            CHECK((p == q) == (q == p));
            for (const auto& r : addrs)
                if (p == q && q == r) CHECK(p == r);
        }
    }
}

TEST_CASE("parse_address rejects malformed input") {
    CHECK_THROWS_AS(parse_address("no-at-sign"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("@x.co"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("a@"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("a@nodot"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("a b@x.co"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("a@x.co@y.co"), MalformedAddress);
    CHECK_THROWS_AS(parse_address("a@.co"), MalformedAddress);
}

TEST_CASE("address render/parse round-trips") {
    for (const char* text : {"alice@example.com", "Bob.Smith@mail.example.org", "x@y.z"}) {
        auto a = parse_address(text);
        auto b = parse_address(a.render());
        CHECK(a == b);
        CHECK(a.render() == b.render());
    }
}

TEST_CASE("IpAddress parses and renders dotted quads") {
    auto ip = IpAddress::parse("10.0.0.255");
    CHECK(ip.render() == "10.0.0.255");
    CHECK(IpAddress::parse(ip.render()) == ip);
    CHECK_FALSE(IpAddress::try_parse("300.1.1.1"));
    CHECK_FALSE(IpAddress::try_parse("1.2.3"));
    CHECK_FALSE(IpAddress::try_parse("1.2.3.4.5"));
    CHECK_FALSE(IpAddress::try_parse("1.2.3.x"));
    CHECK_FALSE(IpAddress::try_parse(""));
}

TEST_CASE("content_digest ignores recipients and sender") {
    auto a = make_msg("Hi", "hello world", {parse_address("c@d.co")});
    auto b = make_msg("Hi", "hello world",
                      {parse_address("e@f.co"), parse_address("g@h.co")});
    CHECK(content_digest(a) == content_digest(b));
}

TEST_CASE("content_digest distinguishes bodies") {
    auto a = make_msg("Hi", "hello world");
    auto b = make_msg("Hi", "hello worle");
    CHECK_FALSE(content_digest(a) == content_digest(b));
}

TEST_CASE("content_digest normalizes whitespace and case") {
    auto a = make_msg("Hi", "hello  world");
    auto b = make_msg("hi", " Hello World\n");
    CHECK(content_digest(a) == content_digest(b));
}

TEST_CASE("content_digest golden values") {
    // FNV-1a 128 over normalize(subject) + 0x1f + normalize(body), frozen
    // against an independent implementation
    CHECK(content_digest(make_msg("", "")).hex == "d228cb69151a8caf78912b704e4a1aa6");
    CHECK(content_digest(make_msg("Hi", "hello world")).hex ==
          "3cef52a123406d951fdf4a987b36567d");
}

TEST_CASE("encoded_size matches the canonical encoding") {
    auto m = make_msg("", "");
    // "FROM:a@b.co\nTO:c@d.co\nSUBJECT:\n\n" counted by hand
    CHECK(m.size_bytes == 32);
    CHECK(encoded_size(m) == m.size_bytes);

    auto longer = make_msg("", std::string(100, 'x'));
    CHECK(longer.size_bytes == m.size_bytes + 100);

    CHECK(encoded_size(m) == encoded_size(m));
}

TEST_CASE("message invariants are enforced") {
    CHECK_THROWS(EmailMessage::make("x", IpAddress(1, 2, 3, 4), "h.example",
                                    parse_address("a@b.co"), {}, "s", "b", 0));
    CHECK_THROWS(EmailMessage::make("x", IpAddress(1, 2, 3, 4), "h.example",
                                    parse_address("a@b.co"),
                                    {parse_address("c@d.co"), parse_address("C@d.co")}, "s",
                                    "b", 0));
}

TEST_CASE("verdict constructors keep the stage/decision coupling") {
    CHECK(Verdict::pass().stage == Stage::Forwarded);
    CHECK(Verdict::failure_to_sender("x").stage == Stage::ReceiverIdent);
    CHECK(Verdict::temp_reject("x").decision == Decision::TempReject);
}
