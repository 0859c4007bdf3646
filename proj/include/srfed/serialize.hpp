#pragma once

#include <cstdint>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "srfed/bigint.hpp"
#include "srfed/defe.hpp"
#include "srfed/numtheory.hpp"

namespace srfed {

using json = nlohmann::json;

// Public group parameters: integers as lowercase hex, N^2 recomputed on load.
inline json group_to_json(const GroupParams& params) {
  return json{{"N", to_hex(params.N)}, {"g", to_hex(params.g)}, {"bit_length", params.bit_length}};
}

inline GroupParams group_from_json(const json& j) {
  GroupParams p;
  p.N = from_hex(j.at("N").get<std::string>());
  p.g = from_hex(j.at("g").get<std::string>());
  p.bit_length = j.at("bit_length").get<unsigned>();
  p.N_squared = p.N * p.N;
  if (p.N < 2 || !p.in_group(p.g)) throw std::invalid_argument("group_from_json: invalid group record");
  return p;
}

// Ciphertext vectors travel as a length-prefixed list of hex values; round and
// base element index come from the enclosing record.
inline std::string ciphertexts_to_text(std::span<const Ciphertext> cts) {
  std::ostringstream out;
  out << cts.size();
  for (const auto& ct : cts) out << ' ' << to_hex(ct.value);
  return out.str();
}

inline std::vector<Ciphertext> ciphertexts_from_text(const std::string& text, std::uint64_t round,
                                                     std::uint64_t element_offset) {
  std::istringstream in(text);
  std::size_t count = 0;
  if (!(in >> count)) throw std::invalid_argument("ciphertexts_from_text: missing length prefix");
  std::vector<Ciphertext> cts(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string hex;
    if (!(in >> hex)) throw std::invalid_argument("ciphertexts_from_text: truncated list");
    cts[i].value = from_hex(hex);
    cts[i].round = round;
    cts[i].element_index = element_offset + i;
  }
  return cts;
}

inline json partial_agg_key_to_json(const PartialAggKey& key) {
  json values = json::array();
  for (const auto& v : key.values) values.push_back(to_hex(v));
  return json{{"client_index", key.client_index}, {"round", key.round}, {"values", values}};
}

inline PartialAggKey partial_agg_key_from_json(const json& j) {
  PartialAggKey key;
  key.client_index = j.at("client_index").get<std::uint32_t>();
  key.round = j.at("round").get<std::uint64_t>();
  for (const auto& v : j.at("values")) key.values.push_back(from_hex(v.get<std::string>()));
  return key;
}

inline json projection_keys_to_json(std::span<const ProjectionKey> keys) {
  json values = json::array();
  for (const auto& k : keys) values.push_back(to_hex(k.value));
  if (keys.empty()) return json{{"client_index", 0}, {"round", 0}, {"values", values}};
  return json{{"client_index", keys.front().client_index},
              {"round", keys.front().round},
              {"values", values}};
}

inline std::vector<ProjectionKey> projection_keys_from_json(const json& j) {
  std::vector<ProjectionKey> keys;
  const auto client = j.at("client_index").get<std::uint32_t>();
  const auto round = j.at("round").get<std::uint64_t>();
  std::uint32_t layer = 0;
  for (const auto& v : j.at("values")) {
    ProjectionKey k;
    k.client_index = client;
    k.round = round;
    k.layer_index = layer++;
    k.value = from_hex(v.get<std::string>());
    keys.push_back(std::move(k));
  }
  return keys;
}

}  // namespace srfed
