/*
   Copyright 2026 The Xscope Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "xscope/core.hpp"
#include "xscope/errors.hpp"

namespace xscope {

/// Deployment knowledge the detector needs but the chain does not carry:
/// which contracts are the bridge routers, what the native coins are called,
/// plus operator-supplied blacklists and address filters.
struct BridgeConfig {
    std::map<ChainId, std::set<Address>> routers;
    std::map<ChainId, std::string> native_symbols;
    std::set<Address> blacklist;
    std::set<Address> address_filters;
    MatchingMode matching_mode = MatchingMode::kInjective;
    std::optional<std::uint32_t> fee_tolerance_bps;

    /// Routers registered for a chain; throws MissingRouterConfig when the
    /// chain has no (nonempty) entry.
    const std::set<Address>& routers_for(const ChainId& chain) const {
        auto it = routers.find(chain);
        if (it == routers.end() || it->second.empty()) {
            throw_error(Errc::kMissingRouterConfig, "no router configured for chain " + chain.value());
        }
        return it->second;
    }

    bool has_routers_for(const ChainId& chain) const {
        auto it = routers.find(chain);
        return it != routers.end() && !it->second.empty();
    }

    bool is_router(const Address& addr) const {
        auto it = routers.find(addr.chain());
        return it != routers.end() && it->second.count(addr) > 0;
    }

    std::string native_symbol(const ChainId& chain) const {
        auto it = native_symbols.find(chain);
        return it == native_symbols.end() ? std::string{} : it->second;
    }

    bool is_blacklisted(const Address& addr) const { return blacklist.count(addr) > 0; }
    bool is_filtered(const Address& addr) const { return address_filters.count(addr) > 0; }
};

namespace detail {

// "chain:0xaddr" entries used by blacklist and address_filters.
inline Address parse_chain_address(const std::string& text, const std::string& field) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0) {
        throw_error(Errc::kConfigInvalid, field + ": expected \"chain:0xaddress\", got \"" + text + "\"");
    }
    try {
        return normalize_address(text.substr(colon + 1), ChainId{text.substr(0, colon)});
    } catch (const Error& e) {
        throw_error(Errc::kConfigInvalid, field + ": " + e.what());
    }
}

}  // namespace detail

inline void validate_config(const BridgeConfig& cfg) {
    for (const auto& [chain, addrs] : cfg.routers) {
        for (const Address& a : addrs) {
            if (a.chain() != chain) {
                throw_error(Errc::kConfigInvalid,
                            "routers." + chain.value() + ": router on wrong chain " + a.chain().value());
            }
        }
    }
    for (const Address& a : cfg.blacklist) {
        if (cfg.address_filters.count(a) > 0) {
            throw_error(Errc::kConfigInvalid, "blacklist/address_filters overlap on " + a.chain().value() +
                                                  ":" + a.hex());
        }
    }
}

inline BridgeConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_error(Errc::kConfigParse, e.what());
    }

    BridgeConfig cfg;
    try {
        if (!doc.is_object()) {
            throw_error(Errc::kConfigParse, "top-level value must be an object");
        }
        if (doc.contains("routers")) {
            for (const auto& [chain_name, list] : doc.at("routers").items()) {
                ChainId chain{chain_name};
                std::set<Address>& routers = cfg.routers[chain];
                for (const auto& entry : list) {
                    routers.insert(normalize_address(entry.get<std::string>(), chain));
                }
            }
        }
        if (doc.contains("native_symbols")) {
            for (const auto& [chain_name, symbol] : doc.at("native_symbols").items()) {
                cfg.native_symbols[ChainId{chain_name}] = symbol.get<std::string>();
            }
        }
        if (doc.contains("blacklist")) {
            for (const auto& entry : doc.at("blacklist")) {
                cfg.blacklist.insert(detail::parse_chain_address(entry.get<std::string>(), "blacklist"));
            }
        }
        if (doc.contains("address_filters")) {
            for (const auto& entry : doc.at("address_filters")) {
                cfg.address_filters.insert(
                    detail::parse_chain_address(entry.get<std::string>(), "address_filters"));
            }
        }
        if (doc.contains("matching_mode")) {
            cfg.matching_mode = parse_matching_mode(doc.at("matching_mode").get<std::string>());
        }
        if (doc.contains("fee_tolerance_bps")) {
            cfg.fee_tolerance_bps = doc.at("fee_tolerance_bps").get<std::uint32_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw_error(Errc::kConfigParse, e.what());
    }

    validate_config(cfg);
    return cfg;
}

inline BridgeConfig load_config(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw_error(Errc::kIo, "cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline std::string config_to_json(const BridgeConfig& cfg) {
    nlohmann::json doc = nlohmann::json::object();
    nlohmann::json routers = nlohmann::json::object();
    for (const auto& [chain, addrs] : cfg.routers) {
        nlohmann::json list = nlohmann::json::array();
        for (const Address& a : addrs) list.push_back(a.hex());
        routers[chain.value()] = list;
    }
    doc["routers"] = routers;
    nlohmann::json symbols = nlohmann::json::object();
    for (const auto& [chain, sym] : cfg.native_symbols) symbols[chain.value()] = sym;
    doc["native_symbols"] = symbols;
    nlohmann::json blacklist = nlohmann::json::array();
    for (const Address& a : cfg.blacklist) blacklist.push_back(a.chain().value() + ":" + a.hex());
    doc["blacklist"] = blacklist;
    nlohmann::json filters = nlohmann::json::array();
    for (const Address& a : cfg.address_filters) filters.push_back(a.chain().value() + ":" + a.hex());
    doc["address_filters"] = filters;
    doc["matching_mode"] = std::string(matching_mode_name(cfg.matching_mode));
    if (cfg.fee_tolerance_bps) {
        doc["fee_tolerance_bps"] = *cfg.fee_tolerance_bps;
    }
    return doc.dump(2) + "\n";
}

}  // namespace xscope
