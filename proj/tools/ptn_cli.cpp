// Runs partitioned contraction jobs and writes one JSON record per job.

#include "ptn/job.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

int main(int argc, char** argv) {
  ptn::JobConfig base;
  std::vector<ptn::Dim> chis = {base.chi};
  std::vector<std::uint64_t> seeds = {base.seed};
  std::string ansatz = "mps";
  std::string out_path;
  std::string csv_path;
  int jobs = 1;

  CLI::App app{"Approximate contraction of tensor networks by partitioned tree approximation"};
  app.add_option("--model", base.model, "ising, random or file")
      ->check(CLI::IsMember({"ising", "random", "file"}))
      ->capture_default_str();
  app.add_option("--graph", base.graph, "lattice or regular")
      ->check(CLI::IsMember({"lattice", "regular"}))
      ->capture_default_str();
  app.add_option("--dims", base.dims, "lattice dimensions, comma separated")->delimiter(',')->capture_default_str();
  app.add_option("--regular-n", base.regular_n, "vertices of the random regular graph")->capture_default_str();
  app.add_option("--regular-degree", base.regular_degree, "degree of the random regular graph")->capture_default_str();
  app.add_option("--beta", base.beta, "inverse temperature of the ising model")->capture_default_str();
  app.add_option("--alpha", base.alpha, "random entries are uniform on [alpha, 1]")->capture_default_str();
  app.add_option("--bond", base.bond, "mode size of the random model")->capture_default_str();
  app.add_option("--file", base.file, "network file for --model file");
  app.add_option("--chi", chis, "maximum bond size; several values run a sweep")->delimiter(',')->capture_default_str();
  app.add_option("--ansatz", ansatz, "mps or comb")->check(CLI::IsMember({"mps", "comb"}))->capture_default_str();
  app.add_option("--partition-size", base.partition_size, "vertices per partition")->capture_default_str();
  app.add_option("--swap-batch", base.swap_batch, "adjacent swaps per density matrix pass")->capture_default_str();
  app.add_option("--seed", seeds, "seed; several values run a sweep")->delimiter(',')->capture_default_str();
  app.add_flag("--oracle", base.oracle, "compare against an exact ln Z when affordable");
  app.add_option("--out", out_path, "append JSON lines here instead of stdout");
  app.add_option("--csv", csv_path, "also write a CSV table");
  app.add_option("--jobs", jobs, "sweep points run concurrently")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  ptn::tune_allocator();

  base.ansatz = ansatz == "comb" ? ptn::Ansatz::Comb : ptn::Ansatz::Mps;
  std::vector<ptn::JobConfig> configs;
  for (ptn::Dim chi : chis)
    for (std::uint64_t seed : seeds) {
      ptn::JobConfig c = base;
      c.chi = chi;
      c.seed = seed;
      configs.push_back(c);
    }
  try {
    for (const auto& c : configs) ptn::validate_config(c);
    if (jobs < 1) throw ptn::Error("jobs must be positive");
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::vector<std::optional<ptn::Report>> reports(configs.size());
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < configs.size();) {
      try {
        reports[i] = ptn::run_job(configs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<int>(jobs, configs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::app);
    if (!file) {
      std::cerr << "cannot open " << out_path << '\n';
      return 1;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  int status = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!reports[i]) {
      std::cerr << "job " << i << " failed: " << errors[i] << '\n';
      status = 1;
      continue;
    }
    out << ptn::report_json(*reports[i]) << '\n';
    if (reports[i]->rel_error && !std::isfinite(*reports[i]->rel_error)) status = 1;
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << ptn::report_csv_header() << '\n';
    for (const auto& r : reports)
      if (r) csv << ptn::report_csv_row(*r) << '\n';
  }
  return status;
}
