// Command-line front end: `wbary solve` and `wbary gen`.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbary/driver.hpp"
#include "wbary/errors.hpp"
#include "wbary/io.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::vector<int> parse_sizes(const std::string& list) {
  std::vector<int> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad size: " + item);
    sizes.push_back(v);
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact discrete Wasserstein barycenters by column generation"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "Compute a barycenter of an instance file");
  std::string input;
  std::string start = "greedy";
  std::string pair = "large";
  double tol = 1e-6;
  std::int64_t max_iter = 100000;
  bool direct = false;
  std::string out_path;
  std::string trace_path;
  solve_cmd->add_option("--input", input, "Instance file (.json, or .csv rows measure_id,coords...,mass)")
      ->required();
  solve_cmd->add_option("--start", start, "Initial vertex")->check(CLI::IsMember({"greedy", "2app"}));
  solve_cmd->add_option("--pair", pair, "Pricing pair choice")->check(CLI::IsMember({"any", "large", "small"}));
  solve_cmd->add_option("--tol", tol, "Stop when the pricing objective is above -tol");
  solve_cmd->add_option("--max-iter", max_iter, "Iteration cap");
  solve_cmd->add_flag("--direct", direct, "Solve the full LP directly instead");
  solve_cmd->add_option("--out", out_path, "Result file (default stdout)");
  solve_cmd->add_option("--trace-csv", trace_path, "Per-iteration trace as CSV");

  auto* gen_cmd = app.add_subcommand("gen", "Generate a random general-position instance");
  int n = 0;
  std::string sizes_list;
  int size = 0;
  int dim = 2;
  std::string masses = "uniform";
  std::uint64_t seed = 1;
  gen_cmd->add_option("--n", n, "Number of measures");
  auto* sizes_opt = gen_cmd->add_option("--sizes", sizes_list, "Comma-separated support sizes");
  auto* size_opt = gen_cmd->add_option("--size", size, "Support size of every measure");
  sizes_opt->excludes(size_opt);
  gen_cmd->add_option("--dim", dim, "Dimension");
  gen_cmd->add_option("--masses", masses, "Mass distribution")->check(CLI::IsMember({"uniform", "random"}));
  gen_cmd->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (*gen_cmd) {
    try {
      wbary::io::GenOptions opt;
      if (!sizes_list.empty()) {
        opt.sizes = parse_sizes(sizes_list);
        if (n != 0 && n != static_cast<int>(opt.sizes.size())) {
          std::cerr << "error: --n " << n << " does not match " << opt.sizes.size() << " sizes\n";
          return kExitInputError;
        }
      } else {
        if (n < 1 || size < 1) {
          std::cerr << "error: give --sizes, or --n with --size\n";
          return kExitInputError;
        }
        opt.sizes.assign(static_cast<std::size_t>(n), size);
      }
      opt.dim = dim;
      opt.random_masses = masses == "random";
      opt.seed = seed;
      const auto inst = wbary::io::generate_instance(opt);
      std::cout << wbary::io::instance_to_json(inst).dump(2) << '\n';
      return kExitConverged;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInputError;
    }
  }

  wbary::Instance inst;
  try {
    inst = wbary::io::load_instance(input);
  } catch (const wbary::Error& e) {
    std::cerr << "error: " << input << ": " << e.what() << '\n';
    return kExitInputError;
  }

  wbary::SolveConfig cfg;
  cfg.start = start == "2app" ? wbary::StartMethod::kTwoApprox : wbary::StartMethod::kGreedy;
  cfg.pair_variant = pair == "any"     ? wbary::PairVariant::kAny
                     : pair == "small" ? wbary::PairVariant::kSmall
                                       : wbary::PairVariant::kLarge;
  cfg.tol = tol;
  cfg.max_iter = max_iter;

  wbary::SolveResult result;
  try {
    result = direct ? wbary::solve_direct(inst, cfg) : wbary::solve(inst, cfg);
  } catch (const wbary::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const wbary::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const wbary::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitInputError;
  }

  if (!write_text(out_path, wbary::io::result_to_json(result).dump(2) + "\n")) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return kExitInputError;
  }
  if (!trace_path.empty() && !write_text(trace_path, wbary::io::trace_csv(result))) {
    std::cerr << "error: cannot write " << trace_path << '\n';
    return kExitInputError;
  }
  return result.converged ? kExitConverged : kExitNotConverged;
}
