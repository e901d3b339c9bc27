// memocheck: run programs with memoized run-time checks, print the
// transformed program, or run the benchmark sweep.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "memocheck/bench/harness.hpp"
#include "memocheck/memocheck.hpp"

using namespace memocheck;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint32_t parse_depth(const std::string& s) {
  if (s == "inf") return kUnlimitedDepth;
  std::size_t used = 0;
  unsigned long v = std::stoul(s, &used);
  if (used != s.size() || v >= kUnlimitedDepth) throw CLI::ValidationError("--depth-limit", "expected N or inf");
  return static_cast<std::uint32_t>(v);
}

struct RunArgs {
  std::string file, goal;
  std::string rtchecks = "on", policy = "lru", depth = "2", invalidation = "flush", on_error = "continue";
  std::size_t cache_size = 256;
  bool stats = false, occurs_check = false;
  std::uint64_t max_answers = 0;
};

int cmd_run(const RunArgs& a) {
  Program prog = parse_program(read_file(a.file));
  EngineOptions opts;
  opts.rtchecks = a.rtchecks == "on";
  opts.cache.policy = a.policy == "lru" ? CachePolicy::Lru : a.policy == "dm" ? CachePolicy::DirectMapped : CachePolicy::None;
  opts.cache.capacity = a.cache_size;
  opts.cache.depth_limit = parse_depth(a.depth);
  opts.cache.invalidation = a.invalidation == "trail" ? Invalidation::TrailSelective : Invalidation::FlushAll;
  opts.occurs_check = a.occurs_check;
  opts.on_error = a.on_error == "abort" ? ErrorMode::Abort : ErrorMode::Continue;
  Engine engine(prog, opts);

  SolveLimits limits;
  if (a.max_answers) limits.max_answers = a.max_answers;
  SolveResult r = engine.solve(a.goal, limits);
  if (r.answers.empty() && !r.aborted) std::cout << "false\n";
  std::cout << r.text();
  for (const auto& v : r.violations) std::cerr << "violation: " << describe(v) << "\n";
  if (a.stats) {
    std::cout << "steps=" << r.stats.steps << "\ninferences=" << r.stats.inferences
              << "\nprop_checks=" << r.stats.prop_checks << "\n"
              << r.cache.to_text();
  }
  return r.violations.empty() && !r.aborted ? 0 : 1;
}

int cmd_check(const std::string& file) {
  Program prog = parse_program(read_file(file));
  Engine engine(prog);
  std::cout << transformed_program(engine);
  return 0;
}

struct BenchArgs {
  std::string bench = "all";
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::uint64_t seed = 1;
  std::string csv, plot;
  int reps = 1;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<const bench::BenchProgram*> selected;
  if (a.bench == "all") {
    for (const auto& p : bench::programs()) selected.push_back(&p);
  } else if (auto* p = bench::find_program(a.bench)) {
    selected.push_back(p);
  } else {
    std::cerr << "unknown benchmark: " << a.bench << "\n";
    return 2;
  }
  std::vector<bench::Measurement> all;
  for (auto* p : selected) {
    std::cerr << "running " << p->name << "\n";
    auto ms = bench::run_bench(*p, a.sizes, bench::default_grid(), a.seed, a.reps);
    all.insert(all.end(), ms.begin(), ms.end());
  }
  if (a.csv.empty()) bench::emit_csv(all, std::cout);
  else bench::emit_csv(all, a.csv);
  if (!a.plot.empty()) std::cerr << bench::emit_plot(all, a.plot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memoized run-time checking of regular types"};
  app.require_subcommand(1);

  RunArgs run;
  auto* r = app.add_subcommand("run", "solve a goal against a program");
  r->add_option("file", run.file)->required()->check(CLI::ExistingFile);
  r->add_option("-g,--goal", run.goal)->required();
  r->add_option("--rtchecks", run.rtchecks)->check(CLI::IsMember({"on", "off"}));
  r->add_option("--cache-policy", run.policy)->check(CLI::IsMember({"lru", "dm", "none"}));
  r->add_option("--cache-size", run.cache_size);
  r->add_option("--depth-limit", run.depth);
  r->add_option("--invalidation", run.invalidation)->check(CLI::IsMember({"flush", "trail"}));
  r->add_option("--on-error", run.on_error)->check(CLI::IsMember({"continue", "abort"}));
  r->add_option("--max-answers", run.max_answers, "stop after this many answers (0 = all)");
  r->add_flag("--stats", run.stats);
  r->add_flag("--occurs-check", run.occurs_check);

  std::string check_file;
  auto* c = app.add_subcommand("check", "print the transformed program");
  c->add_option("file", check_file)->required()->check(CLI::ExistingFile);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run the benchmark sweep");
  b->add_option("--bench", bench.bench);
  b->add_option("--sizes", bench.sizes)->delimiter(',');
  b->add_option("--seed", bench.seed);
  b->add_option("--csv", bench.csv);
  b->add_option("--plot", bench.plot);
  b->add_option("--reps", bench.reps, "keep the fastest of this many runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*r) return cmd_run(run);
    if (*c) return cmd_check(check_file);
    return cmd_bench(bench);
  } catch (const ParseError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return 2;
  } catch (const DefinitionError& e) {
    std::cerr << "definition error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
