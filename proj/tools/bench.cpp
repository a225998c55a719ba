// Benchmark and verification driver for chunked forward-mode gradients.
//
//   bench chunk-sweep --function ackley --size 12000 --chunks 1,2,3,4,5 --reps 3
//   bench size-sweep --function rosenbrock --sizes 10,100,1000 --chunk 10 --threads 4 --reps 3
//   bench verify --function rosenbrock --size 100 --chunk 8
//
// Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fwdiff/bench.hpp>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int write_records(std::vector<fwdiff::bench::BenchRecord> const& records, std::string const& csv) {
  std::cout << fwdiff::bench::format_csv(records);
  if (!csv.empty()) fwdiff::bench::emit_csv(records, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chunked forward-mode gradient benchmarks"};
  app.require_subcommand(1);

  std::vector<std::string> const functions{"rosenbrock", "ackley"};

  std::string function;
  std::size_t size = 0;
  std::vector<std::size_t> chunks;
  std::vector<std::size_t> sizes;
  std::size_t chunk = 0;
  std::size_t threads = 1;
  std::size_t reps = fwdiff::bench::kMinReps;
  std::string csv;
  std::uint64_t seed = fwdiff::bench::kDefaultSeed;
  double tol = fwdiff::bench::kDefaultTolerance;
  std::string point = "random";

  auto* chunk_sweep = app.add_subcommand("chunk-sweep", "Time one input size across chunk sizes");
  chunk_sweep->add_option("--function", function)->required()->check(CLI::IsMember(functions));
  chunk_sweep->add_option("--size", size, "Input dimension k")->required()->check(CLI::Range(2, 1 << 30));
  chunk_sweep->add_option("--chunks", chunks, "Comma-separated chunk sizes")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  chunk_sweep->add_option("--reps", reps)->check(CLI::Range(3, 1 << 20));
  chunk_sweep->add_option("--csv", csv, "Also write records to this file");
  chunk_sweep->add_option("--seed", seed);

  auto* size_sweep = app.add_subcommand("size-sweep", "Time one chunk size across input sizes");
  size_sweep->add_option("--function", function)->required()->check(CLI::IsMember(functions));
  size_sweep->add_option("--sizes", sizes, "Comma-separated input dimensions")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(2, 1 << 30));
  size_sweep->add_option("--chunk", chunk)->required()->check(CLI::PositiveNumber);
  size_sweep->add_option("--threads", threads, "Also time with this many threads")
      ->check(CLI::PositiveNumber);
  size_sweep->add_option("--reps", reps)->check(CLI::Range(3, 1 << 20));
  size_sweep->add_option("--csv", csv, "Also write records to this file");
  size_sweep->add_option("--seed", seed);

  auto* verify = app.add_subcommand("verify", "Check AD against analytic and finite differences");
  verify->add_option("--function", function)->required()->check(CLI::IsMember(functions));
  verify->add_option("--size", size)->required()->check(CLI::Range(2, 1 << 30));
  verify->add_option("--chunk", chunk)->required()->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed);
  verify->add_option("--tol", tol)->check(CLI::PositiveNumber);
  verify->add_option("--point", point, "random (seeded) or ones")
      ->check(CLI::IsMember({"random", "ones"}));

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  auto const fn = *fwdiff::bench::parse_function(function);
  try {
    if (*chunk_sweep) {
      return write_records(fwdiff::bench::run_chunk_sweep(fn, size, chunks, reps, seed), csv);
    }
    if (*size_sweep) {
      return write_records(fwdiff::bench::run_size_sweep(fn, sizes, chunk, threads, reps, seed),
                           csv);
    }
    auto const report =
        point == "ones"
            ? fwdiff::bench::verify_at(fn, std::vector<double>(size, 1.0), chunk, tol)
            : fwdiff::bench::verify(fn, size, chunk, seed, tol);
    fwdiff::bench::print_report(std::cout, report);
    return report.passed() ? 0 : kExitFailure;
  } catch (std::invalid_argument const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
