#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "spamsim/netsim.hpp"

using namespace spamsim;

namespace {

EmailMessage sized_msg(std::size_t body_bytes) {
    return EmailMessage::make("x", IpAddress(1, 2, 3, 4), "h.example",
                              parse_address("a@b.co"), {parse_address("c@d.co")}, "",
                              std::string(body_bytes, 'x'), 0);
}

World two_servers() {
    World w;
    w.add_server("A", {"a.example"});
    w.add_server("B", {"b.example"});
    w.add_server("C", {"c.example"});
    return w;
}

}  // namespace

TEST_CASE("establish_session charges the setup cost") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    cost.session_setup = seconds_to_micros(0.05);
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    CHECK(clock.now() == seconds_to_micros(0.05));
    CHECK(s.open);

    cost.session_setup = 0;
    establish_session(w.server("A"), w.server("B"), clock, cost);
    CHECK(clock.now() == seconds_to_micros(0.05));
}

TEST_CASE("session setup cost is additive across sessions") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    establish_session(w.server("A"), w.server("B"), clock, cost);
    establish_session(w.server("A"), w.server("C"), clock, cost);
    CHECK(clock.now() == 2 * cost.session_setup);
}

TEST_CASE("transmit charges commands plus bytes") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    cost.session_setup = 0;
    cost.per_command = seconds_to_micros(0.001);
    cost.per_byte = 1;

    auto msg = sized_msg(1000 - 32);  // header skeleton is 32 bytes
    REQUIRE(msg.size_bytes == 1000);
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    Micros charged = transmit(msg, 1, s, clock, cost);
    // MAIL + DATA + 1 RCPT = 3 commands, plus 1000 bytes
    CHECK(charged == seconds_to_micros(0.004));
    CHECK(clock.now() == seconds_to_micros(0.004));
    CHECK(s.bytes == 1000);
    CHECK(s.commands == 3);
}

TEST_CASE("transmit with zero bytes charges commands only") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    cost.session_setup = 0;
    auto msg = sized_msg(0);
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    Micros base = clock.now();
    transmit(msg, 1, s, clock, cost);
    CHECK(clock.now() - base == 3 * cost.per_command + cost.per_byte *
                                    static_cast<Micros>(msg.size_bytes));
}

TEST_CASE("recipient count scales the RCPT commands linearly") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    cost.session_setup = 0;
    auto msg = sized_msg(10);
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    Micros one = transmit(msg, 1, s, clock, cost);
    Micros ten = transmit(msg, 10, s, clock, cost);
    CHECK(ten - one == 9 * cost.per_command);
}

TEST_CASE("transmit on a closed session throws") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    close_session(s, clock, cost);
    CHECK_THROWS_AS(transmit(sized_msg(1), 1, s, clock, cost), SessionClosed);
}

TEST_CASE("close charges one QUIT and is idempotent") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    cost.session_setup = 0;
    auto s = establish_session(w.server("A"), w.server("B"), clock, cost);
    close_session(s, clock, cost);
    CHECK(clock.now() == cost.per_command);
    close_session(s, clock, cost);
    CHECK(clock.now() == cost.per_command);
    CHECK_FALSE(s.open);
}

TEST_CASE("built-in profiles reproduce the per-1000 totals exactly") {
    struct Row {
        const char* name;
        Micros expected_total;
    };
    for (auto [name, expected] : {Row{"hotmail", seconds_to_micros(0.1)},
                                  Row{"aol", seconds_to_micros(0.09)},
                                  Row{"microsoft", seconds_to_micros(0.1)},
                                  Row{"trec", seconds_to_micros(200)},
                                  Row{"dspam", seconds_to_micros(250)}}) {
        VirtualClock clock;
        charge_filter(clock, CostModel::named(name), 1000);
        CHECK(clock.now() == expected);
    }
    VirtualClock clock;
    charge_filter(clock, CostModel::named("dspam"), 0);
    CHECK(clock.now() == 0);
}

TEST_CASE("unknown profile names are rejected") {
    CHECK_THROWS(CostModel::named("yahoo"));
}

TEST_CASE("clock never decreases and its ledger adds up") {
    VirtualClock clock;
    CostModel cost = CostModel::named("trec");
    Micros prev = clock.now();
    for (int i = 0; i < 20; ++i) {
        if (i % 2)
            charge_filter(clock, cost, static_cast<std::uint64_t>(i));
        else
            clock.charge(ChargeKind::Network, i * 7);
        CHECK(clock.now() >= prev);
        prev = clock.now();
    }
    Micros sum = 0;
    for (const auto& c : clock.ledger()) sum += c.amount;
    CHECK(sum == clock.now());
    CHECK(clock.total(ChargeKind::Filter) + clock.total(ChargeKind::Network) == clock.now());
    CHECK_THROWS(clock.charge(ChargeKind::Network, -1));
}

TEST_CASE("dns lookups are pure directory reads") {
    DnsDirectory dns;
    dns.add_forward("b.example", "B");
    dns.add_ptr(IpAddress(1, 2, 3, 4), "a.example");
    CHECK(dns_resolve("b.example", dns) == "B");
    CHECK(dns_resolve("B.EXAMPLE", dns) == "B");
    CHECK_FALSE(dns_resolve("nope.example", dns));
    CHECK(dns_reverse(IpAddress(1, 2, 3, 4), dns) == "a.example");
    CHECK_FALSE(dns_reverse(IpAddress(9, 9, 9, 9), dns));
}

TEST_CASE("world files parse servers and ptr records") {
    std::istringstream in(
        "# test world\n"
        "server A domains=a.example clients=10.0.0.2,10.0.0.3\n"
        "server B domains=b.example,b2.example\n"
        "ptr 10.0.0.2 a.example\n");
    World w = parse_world(in);
    CHECK(w.server("A").client_directory.count(IpAddress(10, 0, 0, 2)) == 1);
    CHECK(w.server("B").hosted_domains.count("b2.example") == 1);
    CHECK(dns_resolve("b.example", w.dns) == "B");
    CHECK(dns_reverse(IpAddress(10, 0, 0, 2), w.dns) == "a.example");
    // hosted domains and the forward map stay mutually consistent
    for (const auto& [name, server] : w.servers)
        for (const auto& d : server.hosted_domains) CHECK(dns_resolve(d, w.dns) == name);
}

TEST_CASE("world files reject unknown directives") {
    std::istringstream bad1("frobnicate A\n");
    CHECK_THROWS(parse_world(bad1));
    std::istringstream bad2("server A bogus=1\n");
    CHECK_THROWS(parse_world(bad2));
    std::istringstream bad3("ptr 10.0.0.2\n");
    CHECK_THROWS(parse_world(bad3));
}

TEST_CASE("session to self is rejected") {
    World w = two_servers();
    VirtualClock clock;
    CostModel cost;
    CHECK_THROWS(establish_session(w.server("A"), w.server("A"), clock, cost));
}
