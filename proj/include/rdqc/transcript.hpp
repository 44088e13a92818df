// Copyright 2026 The rdqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rdqc/client.hpp"
#include "rdqc/error.hpp"
#include "rdqc/meta.hpp"

namespace rdqc {

inline constexpr const char *kTranscriptSchema = "rdqc.transcript";
inline constexpr int kTranscriptVersion = 1;

using Json = nlohmann::json;

/// One message. Server messages occupy odd rounds, client messages even ones.
struct TranscriptEvent {
  int round = 1;
  std::string party;  // "server" or "client"
  Json payload;

  bool operator==(const TranscriptEvent &) const = default;
};

/// Line-delimited JSON: a header, the events in order, the settlement and a
/// summary, one object per line.
struct TranscriptFile {
  int version = kTranscriptVersion;
  std::string command;
  std::uint64_t seed = 0;
  Json config = Json::object();
  std::vector<TranscriptEvent> events;
  Json settlement = Json::object();
  Json summary = Json::object();

  bool operator==(const TranscriptFile &) const = default;
};

namespace detail {

inline void check_event_order(const std::vector<TranscriptEvent> &events) {
  int last = 0;
  for (const auto &e : events) {
    if (e.round < 1 || e.round < last) throw TranscriptError("event rounds must be positive and nondecreasing");
    const char *expected = e.round % 2 == 1 ? "server" : "client";
    if (e.party != expected)
      throw TranscriptError("round " + std::to_string(e.round) + " belongs to the " + expected + ", got " + e.party);
    last = e.round;
  }
}

}  // namespace detail

inline std::string serialize_transcript(const TranscriptFile &tf) {
  detail::check_event_order(tf.events);
  std::string out;
  const Json header = {{"kind", "header"}, {"schema", kTranscriptSchema}, {"version", tf.version},
                       {"command", tf.command}, {"seed", tf.seed},      {"config", tf.config}};
  out += header.dump() + "\n";
  for (const auto &e : tf.events)
    out += Json{{"kind", "event"}, {"round", e.round}, {"party", e.party}, {"payload", e.payload}}.dump() + "\n";
  out += Json{{"kind", "settlement"}, {"data", tf.settlement}}.dump() + "\n";
  out += Json{{"kind", "summary"}, {"data", tf.summary}}.dump() + "\n";
  return out;
}

inline TranscriptFile parse_transcript(std::string_view text) {
  TranscriptFile tf;
  std::size_t offset = 0;
  int stage = 0;  // 0 header, 1 events, 2 after settlement, 3 done
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    const bool terminated = end != std::string_view::npos;
    if (!terminated) end = text.size();
    const std::string_view line = text.substr(offset, end - offset);
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::parse_error &e) {
      throw TranscriptError("corrupt transcript at byte offset " + std::to_string(offset + (e.byte > 0 ? e.byte - 1 : 0)) + ": " +
                            e.what());
    }
    if (!terminated) throw TranscriptError("truncated transcript at byte offset " + std::to_string(end));
    try {
      const std::string kind = obj.at("kind").get<std::string>();
      if (stage == 0) {
        if (kind != "header") throw TranscriptError("first line must be the header");
        if (obj.at("schema").get<std::string>() != kTranscriptSchema) throw TranscriptError("not an rdqc transcript");
        tf.version = obj.at("version").get<int>();
        if (tf.version != kTranscriptVersion)
          throw TranscriptError("unsupported transcript version " + std::to_string(tf.version) + " (expected " +
                                std::to_string(kTranscriptVersion) + ")");
        tf.command = obj.at("command").get<std::string>();
        tf.seed = obj.at("seed").get<std::uint64_t>();
        tf.config = obj.at("config");
        stage = 1;
      } else if (stage == 1 && kind == "event") {
        tf.events.push_back({obj.at("round").get<int>(), obj.at("party").get<std::string>(), obj.at("payload")});
      } else if (stage == 1 && kind == "settlement") {
        tf.settlement = obj.at("data");
        stage = 2;
      } else if (stage == 2 && kind == "summary") {
        tf.summary = obj.at("data");
        stage = 3;
      } else {
        throw TranscriptError("unexpected '" + kind + "' line");
      }
    } catch (const Json::exception &e) {
      throw TranscriptError("malformed transcript line at byte offset " + std::to_string(offset) + ": " + e.what());
    }
    offset = end + 1;
  }
  if (stage != 3) throw TranscriptError("truncated transcript at byte offset " + std::to_string(text.size()));
  detail::check_event_order(tf.events);
  return tf;
}

inline void save_transcript(const std::string &path, const TranscriptFile &tf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << serialize_transcript(tf);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline TranscriptFile load_transcript(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_transcript(buf.str());
}

inline Json to_json(const RewardRecord &r, int k) {
  return {{"z", to_bitstring(r.z, k)}, {"y", r.y},         {"b", r.b},      {"reward", r.reward},
          {"Y", r.Y},                  {"path", r.path}, {"bias", r.bias}};
}

/// Round 1: the server's reports (and list). Round 2: the client's private
/// path samples and coins.
inline TranscriptFile protocol_transcript(const std::string &command, const ProtocolReport &rep, const Json &config) {
  TranscriptFile tf;
  tf.command = command;
  tf.seed = rep.seed;
  tf.config = config;
  Json reports = Json::array(), list = Json::array(), coins = Json::array(), rewards = Json::array();
  for (const auto &r : rep.records) {
    reports.push_back(r.y);
    list.push_back(to_bitstring(r.z, rep.k));
    coins.push_back(to_json(r, rep.k));
    rewards.push_back(r.reward);
  }
  Json server = {{"reports", reports}};
  if (rep.mode == "sparse") server["list"] = list;
  tf.events.push_back({1, "server", server});
  tf.events.push_back({2, "client", {{"rounds", coins}}});
  tf.settlement = {{"rewards", rewards}, {"total", rep.total_reward}};
  tf.summary = {{"mode", rep.mode}, {"n", rep.n},         {"depth", rep.depth}, {"k", rep.k},
                {"D", rep.exponent}, {"divisor", rep.divisor}, {"m_coin", rep.m_coin}, {"p", rep.p}};
  if (rep.decision) tf.summary["decision"] = to_string(*rep.decision);
  if (rep.eta) tf.summary["eta"] = *rep.eta;
  return tf;
}

inline TranscriptFile meta_transcript(const std::string &command, std::uint64_t seed, const MetaTranscript &mt, const Json &config) {
  TranscriptFile tf;
  tf.command = command;
  tf.seed = seed;
  tf.config = config;
  tf.events.push_back({1, "server", {{"b", mt.b}}});
  tf.events.push_back({2, "client", {{"branch", mt.branch}, {"accepted", mt.accepted}}});
  tf.settlement = {{"rewards", mt.rewards}, {"total", mt.total()}};
  tf.summary = {{"conclusion", to_string(mt.conclusion)}};
  return tf;
}

}  // namespace rdqc
