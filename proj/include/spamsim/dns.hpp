#ifndef SPAMSIM_DNS_HPP
#define SPAMSIM_DNS_HPP

#include <map>
#include <optional>
#include <string>

#include "spamsim/message.hpp"

namespace spamsim {

// Static directory standing in for real DNS: forward MX-style records
// (domain -> mail server name) and reverse PTR records (ip -> domain).
struct DnsDirectory {
    std::map<std::string, std::string> forward;
    std::map<IpAddress, std::string> reverse;

    void add_forward(const std::string& domain, const std::string& server) {
        forward[ascii_lower(domain)] = server;
    }
    void add_ptr(const IpAddress& ip, const std::string& domain) {
        reverse[ip] = ascii_lower(domain);
    }
};

inline std::optional<std::string> dns_resolve(const std::string& domain,
                                              const DnsDirectory& dns) {
    auto it = dns.forward.find(ascii_lower(domain));
    if (it == dns.forward.end()) return std::nullopt;
    return it->second;
}

inline std::optional<std::string> dns_reverse(const IpAddress& ip, const DnsDirectory& dns) {
    auto it = dns.reverse.find(ip);
    if (it == dns.reverse.end()) return std::nullopt;
    return it->second;
}

}  // namespace spamsim

#endif  // SPAMSIM_DNS_HPP
