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
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdqc/client.hpp"
#include "rdqc/error.hpp"
#include "rdqc/meta.hpp"
#include "rdqc/parser.hpp"
#include "rdqc/reward.hpp"
#include "rdqc/selftest.hpp"
#include "rdqc/server.hpp"
#include "rdqc/statevector.hpp"
#include "rdqc/transcript.hpp"

namespace rdqc {

namespace detail {

struct StrategyArgs {
  std::string kind = "honest_sampling";
  std::uint64_t samples = 0;
  double shift = 0.0;
  std::vector<double> fixed;
  std::uint64_t budget = kDefaultDrawBudget;

  void add_to(CLI::App *cmd) {
    cmd->add_option("--strategy", kind, "server strategy")
        ->check(CLI::IsMember({"honest_sampling", "exact_rational", "fixed_report", "perturbed", "omit_heavy"}));
    cmd->add_option("--samples", samples, "measurements T (overrides the schedule)");
    cmd->add_option("--shift", shift, "report shift for the perturbed strategy");
    cmd->add_option("--fixed", fixed, "report values for fixed_report");
    cmd->add_option("--budget", budget, "server draw budget");
  }

  StrategyConfig config(std::optional<std::pair<double, double>> schedule) const {
    StrategyConfig c;
    c.kind = strategy_kind_from_string(kind);
    c.samples = samples;
    if (samples == 0) c.schedule = schedule;
    c.shift = shift;
    c.fixed = fixed;
    c.draw_budget = budget;
    return c;
  }

  Json echo() const { return {{"strategy", kind}, {"samples", samples}, {"shift", shift}, {"fixed", fixed}, {"budget", budget}}; }
};

inline std::string join(const std::vector<double> &v) {
  std::ostringstream o;
  o << std::setprecision(6);
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? " " : "") << v[i];
  return o.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline Truth parse_truth(const std::string &s) {
  if (s == "yes" || s == "YES") return Truth::yes;
  if (s == "no" || s == "NO") return Truth::no;
  throw ContractViolation("truth must be yes or no");
}

inline Json gap_json(const GapReport &g) {
  Json j = {{"rational_expectation", g.rational_expectation},
            {"best_incorrect_expectation", g.best_incorrect_expectation},
            {"gap", g.gap},
            {"trials", g.trials},
            {"confidence", g.confidence},
            {"rational_correct_rate", g.rational_correct_rate},
            {"adversary_expectations", g.adversary_expectations},
            {"adversary_incorrect_rates", g.adversary_incorrect_rates},
            {"adversary_flipped", g.adversary_flipped}};
  if (g.best_adversary) j["best_adversary"] = *g.best_adversary;
  if (!g.note.empty()) j["note"] = g.note;
  return j;
}

inline void print_gap(std::ostream &out, const GapReport &g) {
  out << "rational E[R]       " << g.rational_expectation << "\n"
      << "best incorrect E[R] " << g.best_incorrect_expectation << "\n"
      << "gap                 " << g.gap << " +- " << g.confidence << " (3 sigma, " << g.trials << " trials)\n";
  if (!g.note.empty()) out << "note: " << g.note << "\n";
}

}  // namespace detail

/// Command-line entry point. Exit codes: 0 success, 1 usage or I/O error
/// or failed self-test, 2 contract violation.
inline int cli_run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Rational delegation of quantum computation: protocols, oracles and experiments", "rdqc"};
  // -h would collide with the confidence parameter --h.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_config("--config", "", "TOML file with option values");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 7;
  std::string out_path;
  app.add_option("--seed", seed, "master seed (RDL_SEED overrides)");
  app.add_option("--out", out_path, "output file (transcript or JSON report)");

  std::string circuit_path;
  int k = 1;
  double f = 10.0, h = 5.0;
  unsigned m_coin = 0;
  int k_cap = kDefaultKCap;
  detail::StrategyArgs strat;

  auto add_circuit = [&](CLI::App *cmd) { cmd->add_option("--circuit", circuit_path, "circuit file")->required(); };
  auto add_fh = [&](CLI::App *cmd) {
    cmd->add_option("--f", f, "accuracy parameter f (target l1 error 1/f)");
    cmd->add_option("--h", h, "confidence parameter h (failure e^-h)");
  };

  CLI::App *estimate = app.add_subcommand("estimate", "estimate the first-k-qubit output distribution");
  add_circuit(estimate);
  estimate->add_option("--k", k, "number of measured qubits");
  add_fh(estimate);
  estimate->add_option("--m-coin", m_coin, "coin precision in bits (default D + 64)");
  estimate->add_option("--k-cap", k_cap, "largest allowed k");
  strat.add_to(estimate);

  CLI::App *decide = app.add_subcommand("decide", "decide a Q-CIRCUIT instance");
  add_circuit(decide);
  add_fh(decide);
  decide->add_option("--m-coin", m_coin, "coin precision in bits (default D + 64)");
  strat.add_to(decide);

  std::uint64_t t = 1;
  double eps = 1.0 / 6.0, delta = 1e-6;
  CLI::App *sparse = app.add_subcommand("sparse", "estimate an approximately sparse output distribution");
  add_circuit(sparse);
  sparse->add_option("--t", t, "sparsity t");
  sparse->add_option("--eps", eps, "approximation eps <= 1/6");
  sparse->add_option("--delta", delta, "failure probability");
  sparse->add_option("--m-coin", m_coin, "coin precision in bits (default D + 64)");
  strat.add_to(sparse);

  double q = 0.5, divisor = 2.0, step = 0.01;
  std::int64_t exponent = 2;
  std::string csv_path;
  CLI::App *curve = app.add_subcommand("reward-curve", "tabulate the expected reward against the report");
  curve->add_option("--q", q, "true probability");
  curve->add_option("--D", exponent, "path exponent D");
  curve->add_option("--divisor", divisor, "reward divisor");
  curve->add_option("--step", step, "grid step over [0, 1/2]");
  curve->add_option("--csv", csv_path, "also write the table as CSV");

  std::string gap_kind = "protocol1", truth_s = "yes", policy_s = "rational", meta_kind = "2";
  std::uint64_t trials = 1000;
  double c_prime = 2.0 / 3.0, s_prime = 1.0 / 3.0, rho = 0.0;
  int provers = 2, reps = 61;
  auto add_oracle = [&](CLI::App *cmd) {
    cmd->add_option("--c", c_prime, "completeness c'");
    cmd->add_option("--s", s_prime, "soundness s'");
    cmd->add_option("--provers", provers, "number of provers M");
    cmd->add_option("--truth", truth_s, "instance truth (yes or no)");
    cmd->add_option("--rho", rho, "rational policy bit-error rate");
  };
  CLI::App *gap = app.add_subcommand("gap", "measure the reward gap of a protocol");
  gap->add_option("--kind", gap_kind, "protocol1, protocol2 or protocol3")->check(CLI::IsMember({"protocol1", "protocol2", "protocol3"}));
  gap->add_option("--circuit", circuit_path, "circuit file (protocol1)");
  add_fh(gap);
  gap->add_option("--trials", trials, "trials per strategy");
  add_oracle(gap);

  CLI::App *meta = app.add_subcommand("meta", "claim-bit wrappers, conversions and amplification");
  meta->add_option("--protocol", meta_kind, "2, 3, ip-to-rdqc, rdqc-to-ip or amplify")
      ->check(CLI::IsMember({"2", "3", "ip-to-rdqc", "rdqc-to-ip", "amplify"}));
  add_oracle(meta);
  meta->add_option("--policy", policy_s, "rational, forced0, forced1 or adversarial");
  meta->add_option("--reps", reps, "majority-vote repetitions (amplify)");
  meta->add_option("--trials", trials, "trials (0 runs once and writes a transcript)");

  std::vector<int> only;
  CLI::App *selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--only", only, "criterion numbers to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (const char *env = std::getenv("RDL_SEED")) {
    try {
      std::size_t pos = 0;
      seed = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
      err << "RDL_SEED must be an unsigned 64-bit integer\n";
      return 1;
    }
  }

  try {
    out << std::setprecision(10);
    if (*estimate || *decide || *sparse) {
      const Circuit c = load_circuit(circuit_path);
      Json config = {{"circuit", circuit_path}, {"f", f}, {"h", h}, {"m_coin", m_coin}};
      config.update(strat.echo());
      ProtocolParams params;
      params.seed = seed;
      params.f = f;
      params.h = h;
      params.m_coin = m_coin;
      params.k_cap = k_cap;
      ProtocolReport rep;
      std::string command;
      if (*sparse) {
        command = "sparse";
        config.update({{"t", t}, {"eps", eps}, {"delta", delta}});
        const SparseParams sp = SparseParams::make(t, eps, delta);
        rep = run_protocol_sparse(c, sp, make_sparse_server(strat.config(std::nullopt)), params);
      } else if (*decide) {
        command = "decide";
        rep = run_decision(c, make_protocol1_server(strat.config(std::pair{f, h})), params);
      } else {
        command = "estimate";
        params.k = k;
        config["k"] = k;
        rep = run_protocol1(c, make_protocol1_server(strat.config(std::pair{f, h})), params);
      }
      out << command << ": n=" << rep.n << " L=" << rep.depth << " k=" << rep.k << " D=" << rep.exponent
          << " divisor=" << rep.divisor << " seed=" << seed << "\n";
      std::vector<double> truth;
      if (c.n() <= kStatevectorCap) truth = exact_output_dist(c, rep.k).probs;
      for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const auto &r = rep.records[i];
        out << "  z=" << to_bitstring(r.z, rep.k) << "  y=" << r.y << "  b=" << r.b << "  R=" << r.reward << "  p=" << rep.p[i];
        if (!truth.empty()) out << "  q=" << truth[r.z];
        out << "\n";
      }
      out << "total reward " << rep.total_reward << "\n";
      TranscriptFile tf = protocol_transcript(command, rep, config);
      if (!truth.empty()) {
        std::vector<double> p_full(truth.size(), 0.0);
        for (std::size_t i = 0; i < rep.records.size(); ++i) p_full[rep.records[i].z] = rep.p[i];
        const double l1 = l1_distance(p_full, truth);
        out << "l1 distance to exact " << l1 << "\n";
        tf.summary["l1_to_exact"] = l1;
      }
      if (rep.decision) out << "decision " << to_string(*rep.decision) << " (eta=" << *rep.eta << ")\n";
      if (!out_path.empty()) save_transcript(out_path, tf);
      return 0;
    }

    if (*curve) {
      const RewardCurve rc = reward_curve(q, exponent, divisor, step);
      out << "q=" << rc.q << " D=" << rc.exponent << " divisor=" << rc.divisor << "\n"
          << "argmax y*=" << rc.vertex << " (q/2=" << rc.q / 2 << "), max E[R]=" << rc.max_value << "\n"
          << "y,expected,scaled_excess\n";
      std::ostringstream csv;
      csv << std::setprecision(17) << "y,expected,scaled_excess\n";
      for (std::size_t i = 0; i < rc.y.size(); ++i) {
        out << rc.y[i] << "," << rc.expected[i] << "," << rc.excess[i] << "\n";
        csv << rc.y[i] << "," << rc.expected[i] << "," << rc.excess[i] << "\n";
      }
      if (!csv_path.empty()) detail::write_text(csv_path, csv.str());
      if (!out_path.empty())
        detail::write_text(out_path, Json{{"q", rc.q}, {"D", rc.exponent}, {"divisor", rc.divisor}, {"vertex", rc.vertex},
                                          {"max_value", rc.max_value}, {"y", rc.y}, {"expected", rc.expected},
                                          {"scaled_excess", rc.excess}}
                                             .dump(2) + "\n");
      return 0;
    }

    if (*gap) {
      GapReport g;
      if (gap_kind == "protocol1") {
        if (circuit_path.empty()) throw ContractViolation("--circuit is required for protocol1");
        const Circuit c = load_circuit(circuit_path);
        const double q1 = exact_output_dist(c, 1).probs[1];
        const Decision truth = q1 >= 0.5 ? Decision::yes : Decision::no;
        StrategyConfig rational;
        rational.kind = StrategyKind::exact_rational;
        StrategyConfig swap;
        swap.kind = StrategyKind::fixed_report;
        swap.fixed = {q1 / 2.0, (1.0 - q1) / 2.0};
        auto runner = [&](const StrategyConfig &s, std::uint64_t trial_seed) {
          ProtocolParams params;
          params.seed = trial_seed;
          params.f = f;
          params.h = h;
          const ProtocolReport rep = run_decision(c, make_protocol1_server(s), params);
          return TrialOutcome{rep.total_reward, rep.decision == truth};
        };
        g = measure_reward_gap(runner, rational, std::vector<StrategyConfig>{swap}, trials, seed);
        // Exact expectations of both strategies for comparison with the noisy estimate.
        const std::int64_t d = path_bit_count(c.n(), c.depth(), 1);
        const double q0 = 1.0 - q1;
        const double exact = (scaled_reward_excess(q0, q0 / 2) + scaled_reward_excess(q1, q1 / 2)) -
                             (scaled_reward_excess(q0, swap.fixed[0]) + scaled_reward_excess(q1, swap.fixed[1]));
        out << "closed-form gap     " << std::ldexp(exact, static_cast<int>(-2 * d)) / 2.0 << "\n";
      } else {
        IPOracle o;
        o.completeness = c_prime;
        o.soundness = s_prime;
        o.provers = gap_kind == "protocol3" ? 1 : provers;
        const Truth truth = detail::parse_truth(truth_s);
        auto runner = [&](const Policy &p, std::uint64_t trial_seed) {
          Rng rng(trial_seed);
          const MetaTranscript tr = gap_kind == "protocol3" ? run_protocol3(o, truth, p, rng) : run_protocol2(o, o, truth, p, rng);
          return TrialOutcome{tr.total(), (tr.conclusion == Decision::yes) == (truth == Truth::yes)};
        };
        g = measure_reward_gap(runner, Policy{BitPolicy::rational, rho}, std::vector<Policy>{{BitPolicy::adversarial, 0.0}}, trials,
                               seed);
      }
      detail::print_gap(out, g);
      if (!out_path.empty()) detail::write_text(out_path, detail::gap_json(g).dump(2) + "\n");
      return 0;
    }

    if (*meta) {
      const Truth truth = detail::parse_truth(truth_s);
      const Policy policy{bit_policy_from_string(policy_s), rho};
      IPOracle o;
      o.completeness = c_prime;
      o.soundness = s_prime;
      o.provers = meta_kind == "2" ? provers : 1;
      o.validate();
      const Json config = {{"protocol", meta_kind}, {"c", c_prime}, {"s", s_prime}, {"provers", o.provers}, {"truth", truth_s},
                           {"policy", policy_s},    {"rho", rho},   {"reps", reps},   {"trials", trials}};
      if (meta_kind == "rdqc-to-ip" || meta_kind == "amplify") {
        // Synthetic constrained protocol: rational reward Bernoulli(c),
        // incorrect reward Bernoulli(s).
        const ConstrainedRdqc base = acceptance::bernoulli_rdqc(c_prime, c_prime - s_prime);
        const std::uint64_t n = trials == 0 ? 1000 : trials;
        if (meta_kind == "rdqc-to-ip") {
          Rng rng = SeedTree(seed).stream("oracle");
          std::uint64_t acc_yes = 0, acc_no = 0;
          for (std::uint64_t i = 0; i < n; ++i) {
            acc_yes += rdqc_to_ip(base, Truth::yes, RdqcMode::rational, rng) ? 1 : 0;
            acc_no += rdqc_to_ip(base, Truth::no, RdqcMode::incorrect, rng) ? 1 : 0;
          }
          out << "acceptance (member, honest)         " << static_cast<double>(acc_yes) / n << "\n"
              << "acceptance (non-member, malicious)  " << static_cast<double>(acc_no) / n << "\n";
          return 0;
        }
        const AmplifiedRdqc amp = amplify_gap(base, reps, rho);
        out << "majority of " << reps << ": completeness " << amp.oracle_l.completeness << ", soundness " << amp.oracle_l.soundness
            << "\n";
        auto runner = [&](RdqcMode mode, std::uint64_t trial_seed) {
          Rng r(trial_seed);
          const RdqcRun run = amp.protocol.run(truth, mode, r);
          return TrialOutcome{run.reward, (run.b == 1) == (truth == Truth::yes)};
        };
        const GapReport g = measure_reward_gap(runner, RdqcMode::rational, std::vector<RdqcMode>{RdqcMode::incorrect}, n, seed);
        detail::print_gap(out, g);
        if (!out_path.empty()) detail::write_text(out_path, detail::gap_json(g).dump(2) + "\n");
        return 0;
      }
      auto once = [&](const Policy &p, Rng &rng) {
        if (meta_kind == "2") return run_protocol2(o, o, truth, p, rng);
        if (meta_kind == "3") return run_protocol3(o, truth, p, rng);
        return ip_to_rdqc(o, o, truth, p, rng);
      };
      if (trials == 0) {
        Rng rng = SeedTree(seed).stream("meta");
        const MetaTranscript tr = once(policy, rng);
        out << "b=" << tr.b << " branch=" << tr.branch << " accepted=" << (tr.accepted ? "yes" : "no") << " rewards=" << detail::join(tr.rewards)
            << " conclusion=" << to_string(tr.conclusion) << "\n";
        if (meta_kind == "ip-to-rdqc") out << "declared margin " << ip_to_rdqc_witness(o, rho) << "\n";
        if (!out_path.empty()) save_transcript(out_path, meta_transcript("meta", seed, tr, config));
        return 0;
      }
      auto runner = [&](const Policy &p, std::uint64_t trial_seed) {
        Rng rng(trial_seed);
        const MetaTranscript tr = once(p, rng);
        return TrialOutcome{tr.total(), (tr.conclusion == Decision::yes) == (truth == Truth::yes)};
      };
      const GapReport g = measure_reward_gap(runner, policy, std::vector<Policy>{{BitPolicy::adversarial, 0.0}}, trials, seed);
      detail::print_gap(out, g);
      if (meta_kind == "ip-to-rdqc") out << "declared margin " << ip_to_rdqc_witness(o, rho) << "\n";
      if (!out_path.empty()) detail::write_text(out_path, detail::gap_json(g).dump(2) + "\n");
      return 0;
    }

    if (*selftest) {
      SelftestOptions opt;
      if (std::getenv("RDL_SEED")) opt.seed = seed;
      bool all = true;
      for (const auto &c : acceptance_criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const CriterionResult r = run_criterion(c, opt);
        all = all && r.passed;
        out << format_result(r) << std::endl;
      }
      out << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
      return all ? 0 : 1;
    }
  } catch (const ContractViolation &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rdqc
