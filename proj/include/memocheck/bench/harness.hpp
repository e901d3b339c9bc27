#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "memocheck/bench/programs.hpp"
#include "memocheck/engine.hpp"

namespace memocheck::bench {

/// A benchmark that produced assertion violations or no answer.
struct BenchmarkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  bool rtchecks = true;
  CacheConfig cache;
  std::uint64_t audit_interval = 0;  // soundness audit every N engine steps

  std::string label() const {
    if (!rtchecks) return "off";
    return cache.describe();
  }
};

struct Measurement {
  std::string benchmark;
  char group = 'a';
  std::size_t size = 0;
  BenchConfig config;
  double wall_ms = 0;
  std::uint64_t inferences = 0;
  std::uint64_t node_visits = 0;
  std::uint64_t lookups = 0, hits = 0, insertions = 0, evictions = 0, flushes = 0;
  std::uint32_t max_check_depth = 0;
  std::uint64_t audits = 0, audit_failures = 0;
};

inline BenchConfig unchecked() { return {false, {CachePolicy::None, 0, 2, Invalidation::FlushAll}, 0}; }
inline BenchConfig uncached() { return {true, {CachePolicy::None, 0, 2, Invalidation::FlushAll}, 0}; }
inline BenchConfig cached(CachePolicy p, std::size_t capacity, std::uint32_t depth) {
  return {true, {p, capacity, depth, Invalidation::FlushAll}, 0};
}

/// The default sweep: baseline, uncached reference, and both policies over
/// capacities {1, 16, 256} and depth limits {1, 2, 5, inf}.
inline std::vector<BenchConfig> default_grid() {
  std::vector<BenchConfig> g{unchecked(), uncached()};
  for (CachePolicy p : {CachePolicy::Lru, CachePolicy::DirectMapped})
    for (std::size_t c : {1, 16, 256})
      for (std::uint32_t d : {1u, 2u, 5u, kUnlimitedDepth}) g.push_back(cached(p, c, d));
  return g;
}

/// Uniformly random keys in [0, 10n).
inline std::vector<std::int64_t> make_keys(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(0, static_cast<std::int64_t>(10 * n) - 1);
  std::vector<std::int64_t> keys(n);
  for (auto& k : keys) k = dist(rng);
  return keys;
}

inline SourceTerm keys_goal(const std::vector<std::int64_t>& keys, SymbolTable& symbols) {
  SourceTerm list = SourceTerm::atom(symbols.intern("[]"));
  SymbolId dot = symbols.intern(".");
  for (auto it = keys.rbegin(); it != keys.rend(); ++it)
    list = SourceTerm::compound(dot, {SourceTerm::integer(*it), std::move(list)});
  return SourceTerm::compound(symbols.intern("main"), {std::move(list)});
}

/// One run of `main(Keys)`. `reps` > 1 keeps the fastest wall time; the
/// counters are identical across repetitions.
inline Measurement run_one(const BenchProgram& bp, const Program& prog, const std::vector<std::int64_t>& keys,
                           const BenchConfig& cfg, int reps = 1) {
  EngineOptions opts;
  opts.rtchecks = cfg.rtchecks;
  opts.cache = cfg.cache;
  opts.audit_interval = cfg.audit_interval;
  Engine engine(prog, opts);
  SourceTerm goal = keys_goal(keys, engine.symbols());
  Measurement m;
  m.benchmark = std::string(bp.name);
  m.group = bp.group;
  m.size = keys.size();
  m.config = cfg;
  m.wall_ms = 1e300;
  for (int r = 0; r < std::max(1, reps); ++r) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res = engine.solve(goal, {}, {1, std::numeric_limits<std::uint64_t>::max()});
    auto t1 = std::chrono::steady_clock::now();
    m.wall_ms = std::min(m.wall_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (res.answers.empty())
      throw BenchmarkError(m.benchmark + " with " + std::to_string(m.size) + " keys produced no answer");
    if (!res.violations.empty())
      throw BenchmarkError(m.benchmark + " is not check-clean: " + describe(res.violations.front()));
    m.inferences = res.stats.inferences;
    m.node_visits = res.cache.node_visits;
    m.lookups = res.cache.lookups;
    m.hits = res.cache.hits;
    m.insertions = res.cache.insertions;
    m.evictions = res.cache.evictions;
    m.flushes = res.cache.flushes;
    m.max_check_depth = res.cache.max_check_depth;
    m.audits = res.stats.audits;
    m.audit_failures = res.stats.audit_failures;
  }
  return m;
}

/// One measurement per (size, config).
inline std::vector<Measurement> run_bench(const BenchProgram& bp, const std::vector<std::size_t>& sizes,
                                          const std::vector<BenchConfig>& grid, std::uint64_t seed, int reps = 1) {
  Program prog = parse_program(bp.source);
  std::vector<Measurement> out;
  for (std::size_t n : sizes) {
    if (n == 0) throw std::invalid_argument("benchmark sizes must be positive");
    auto keys = make_keys(n, seed);
    for (const auto& cfg : grid) out.push_back(run_one(bp, prog, keys, cfg, reps));
  }
  return out;
}

inline const BenchProgram* find_program(std::string_view name) {
  for (const auto& p : programs())
    if (p.name == name) return &p;
  if (name == length_sentinel().name) return &length_sentinel();
  return nullptr;
}

// -- output ---------------------------------------------------------------

inline std::string policy_text(const Measurement& m) { return to_string(m.config.cache.policy); }

inline void sort_measurements(std::vector<Measurement>& ms) {
  auto key = [](const Measurement& m) {
    return std::make_tuple(m.benchmark, m.size, m.config.rtchecks, static_cast<int>(m.config.cache.policy),
                           m.config.cache.capacity, m.config.cache.depth_limit);
  };
  std::stable_sort(ms.begin(), ms.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

inline void emit_csv(std::vector<Measurement> ms, std::ostream& os) {
  sort_measurements(ms);
  os << "benchmark,size,policy,capacity,depth_limit,rtchecks,wall_ms,node_visits,lookups,hits,insertions,"
        "evictions,flushes,max_check_depth\n";
  for (const auto& m : ms) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", m.wall_ms);
    os << m.benchmark << ',' << m.size << ',' << policy_text(m) << ',' << m.config.cache.capacity << ','
       << depth_text(m.config.cache.depth_limit) << ',' << (m.config.rtchecks ? "on" : "off") << ',' << wall << ','
       << m.node_visits << ',' << m.lookups << ',' << m.hits << ',' << m.insertions << ',' << m.evictions << ','
       << m.flushes << ',' << m.max_check_depth << '\n';
  }
}

inline void emit_csv(const std::vector<Measurement>& ms, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  emit_csv(ms, out);
  if (!out) throw std::runtime_error("error writing " + path);
}

/// Deterministic work of a run relative to the unchecked baseline:
/// (inferences + automaton node visits) / baseline inferences.
inline double counter_ratio(const Measurement& m, const Measurement& base) {
  return static_cast<double>(m.inferences + m.node_visits) / static_cast<double>(std::max<std::uint64_t>(1, base.inferences));
}

inline double time_ratio(const Measurement& m, const Measurement& base) {
  return m.wall_ms / std::max(1e-9, base.wall_ms);
}

/// Writes per-benchmark series (size against overhead ratio, one column per
/// config) for wall time and for the counter ratio, a gnuplot script, and a
/// summary. With a single size there is no series: bar data is written
/// instead. Returns the summary text.
inline std::string emit_plot(const std::vector<Measurement>& ms, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };

  std::map<std::string, std::vector<const Measurement*>> by_bench;
  for (const auto& m : ms) by_bench[m.benchmark].push_back(&m);

  std::ostringstream summary, script;
  script << "set terminal svg size 900,600\nset logscale y\nset key outside\nset xlabel 'input size'\n";
  for (auto& [name, rows] : by_bench) {
    std::vector<std::size_t> sizes;
    std::vector<std::string> labels;
    for (auto* m : rows) {
      if (std::find(sizes.begin(), sizes.end(), m->size) == sizes.end()) sizes.push_back(m->size);
      if (std::find(labels.begin(), labels.end(), m->config.label()) == labels.end()) labels.push_back(m->config.label());
    }
    std::sort(sizes.begin(), sizes.end());
    auto find = [&](std::size_t n, const std::string& label) -> const Measurement* {
      for (auto* m : rows)
        if (m->size == n && m->config.label() == label) return m;
      return nullptr;
    };
    auto ratio_table = [&](bool counters) {
      std::ostringstream t;
      t << "# size";
      for (const auto& l : labels) t << ' ' << l;
      t << '\n';
      for (std::size_t n : sizes) {
        const Measurement* base = find(n, "off");
        t << n;
        for (const auto& l : labels) {
          const Measurement* m = find(n, l);
          if (!m || !base) t << " NaN";
          else t << ' ' << (counters ? counter_ratio(*m, *base) : time_ratio(*m, *base));
        }
        t << '\n';
      }
      return t.str();
    };

    if (sizes.size() < 2) {
      auto f = open(name + ".bars.dat");
      f << "# config time_ratio counter_ratio\n";
      const Measurement* base = find(sizes.front(), "off");
      for (const auto& l : labels) {
        const Measurement* m = find(sizes.front(), l);
        f << l << ' ' << (base ? time_ratio(*m, *base) : 0) << ' ' << (base ? counter_ratio(*m, *base) : 0) << '\n';
      }
      summary << name << ": single size " << sizes.front() << ", bar data only\n";
      continue;
    }
    open(name + ".time.dat") << ratio_table(false);
    open(name + ".count.dat") << ratio_table(true);
    for (const char* kind : {"time", "count"}) {
      script << "set output '" << name << "." << kind << ".svg'\nset title '" << name << " ("
             << (kind[0] == 't' ? "wall-time" : "counter") << " overhead ratio)'\nplot ";
      for (std::size_t i = 0; i < labels.size(); ++i)
        script << (i ? ", " : "") << "'" << name << "." << kind << ".dat' using 1:" << i + 2
               << " with linespoints title '" << labels[i] << "'";
      script << "\n";
    }

    std::size_t big = sizes.back();
    const Measurement* base = find(big, "off");
    const Measurement* none = find(big, "none");
    const Measurement* best = nullptr;
    for (const auto& l : labels) {
      if (l == "off" || l == "none") continue;
      const Measurement* m = find(big, l);
      if (m && (!best || m->node_visits < best->node_visits)) best = m;
    }
    summary << name << " @" << big << ":";
    if (base && none) summary << " uncached " << counter_ratio(*none, *base);
    if (base && best) summary << ", best cached (" << best->config.label() << ") " << counter_ratio(*best, *base);
    if (base && none && best) summary << ", gap x" << counter_ratio(*none, *base) / counter_ratio(*best, *base);
    summary << "\n";
  }
  open("plot.gp") << script.str();
  open("summary.txt") << summary.str();
  return summary.str();
}

}  // namespace memocheck::bench
