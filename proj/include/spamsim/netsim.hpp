#ifndef SPAMSIM_NETSIM_HPP
#define SPAMSIM_NETSIM_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spamsim/clock.hpp"
#include "spamsim/dns.hpp"
#include "spamsim/message.hpp"
#include "spamsim/pipeline.hpp"

namespace spamsim {

struct MailServer {
    std::string name;
    std::set<std::string> hosted_domains;
    std::set<IpAddress> client_directory;
    std::optional<FilterContext> filter;  // present iff filters are mounted here
    std::map<std::string, std::uint64_t> mailboxes;  // delivered, by address key
    std::map<std::string, std::uint64_t> spam_folder;
};

struct World {
    std::map<std::string, MailServer> servers;
    DnsDirectory dns;

    MailServer& server(const std::string& name) {
        auto it = servers.find(name);
        if (it == servers.end()) throw std::runtime_error("unknown server: " + name);
        return it->second;
    }
    const MailServer& server(const std::string& name) const {
        auto it = servers.find(name);
        if (it == servers.end()) throw std::runtime_error("unknown server: " + name);
        return it->second;
    }

    void add_server(const std::string& name, std::set<std::string> domains,
                    std::set<IpAddress> clients = {}) {
        MailServer s;
        s.name = name;
        s.hosted_domains = std::move(domains);
        s.client_directory = std::move(clients);
        for (const auto& d : s.hosted_domains) dns.add_forward(d, name);
        servers[name] = std::move(s);
    }
};

struct SessionClosed : std::runtime_error {
    SessionClosed() : std::runtime_error("SMTP session is closed") {}
};

struct SmtpSession {
    std::string from_server;
    std::string to_server;
    Micros opened_at = 0;
    std::uint64_t commands = 0;
    std::uint64_t bytes = 0;
    bool open = false;
};

// Models connection setup plus the HELO exchange as one flat charge.
inline SmtpSession establish_session(const MailServer& a, const MailServer& b,
                                     VirtualClock& clock, const CostModel& cost) {
    if (a.name == b.name) throw std::runtime_error("session to self: " + a.name);
    clock.charge(ChargeKind::Network, cost.session_setup);
    SmtpSession s;
    s.from_server = a.name;
    s.to_server = b.name;
    s.opened_at = clock.now();
    s.open = true;
    return s;
}

// MAIL FROM + DATA + one RCPT TO per recipient, plus the message bytes.
inline Micros transmit(const EmailMessage& msg, std::uint64_t rcpt_count, SmtpSession& session,
                       VirtualClock& clock, const CostModel& cost) {
    if (!session.open) throw SessionClosed();
    if (rcpt_count < 1) throw std::runtime_error("transmit needs at least one recipient");
    Micros amount = cost.per_command * static_cast<Micros>(2 + rcpt_count) +
                    cost.per_byte * static_cast<Micros>(msg.size_bytes);
    clock.charge(ChargeKind::Network, amount);
    session.commands += 2 + rcpt_count;
    session.bytes += msg.size_bytes;
    return amount;
}

// QUIT; second close is free.
inline void close_session(SmtpSession& session, VirtualClock& clock, const CostModel& cost) {
    if (!session.open) return;
    session.open = false;
    clock.charge(ChargeKind::Network, cost.per_command);
    session.commands += 1;
}

// ---------------------------------------------------------------------------
// World description file:
//   server <name> domains=<d1,d2> clients=<ip,...>
//   ptr <ip> <domain>

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline World parse_world(std::istream& in) {
    World world;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "server") {
            std::string name, field;
            ls >> name;
            if (name.empty())
                throw std::runtime_error("world line " + std::to_string(lineno) +
                                         ": server needs a name");
            std::set<std::string> domains;
            std::set<IpAddress> clients;
            while (ls >> field) {
                if (field.rfind("domains=", 0) == 0) {
                    for (const auto& d : detail::split(field.substr(8), ','))
                        if (!d.empty()) domains.insert(ascii_lower(d));
                } else if (field.rfind("clients=", 0) == 0) {
                    for (const auto& ip : detail::split(field.substr(8), ','))
                        if (!ip.empty()) clients.insert(IpAddress::parse(ip));
                } else {
                    throw std::runtime_error("world line " + std::to_string(lineno) +
                                             ": unknown field " + field);
                }
            }
            world.add_server(name, std::move(domains), std::move(clients));
        } else if (kind == "ptr") {
            std::string ip, domain;
            ls >> ip >> domain;
            if (ip.empty() || domain.empty())
                throw std::runtime_error("world line " + std::to_string(lineno) +
                                         ": ptr needs <ip> <domain>");
            world.dns.add_ptr(IpAddress::parse(ip), domain);
        } else {
            throw std::runtime_error("world line " + std::to_string(lineno) +
                                     ": unknown directive " + kind);
        }
    }
    return world;
}

}  // namespace spamsim

#endif  // SPAMSIM_NETSIM_HPP
