// qcdiff <command> --config <path> --out <dir> [--max-n N] [--seed S]
//
// Exit status: 0 all checks pass, 1 a tolerance check failed, 2 the config
// (or command line) is unusable, 3 an engine error.

#include "qcdiff/cases.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#ifndef QCDIFF_CONFIG_DIR
#define QCDIFF_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace {

int list_cases() {
  const fs::path dir = fs::path(QCDIFF_CONFIG_DIR) / "examples";
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string command = "?", description;
    try {
      const auto j = qcdiff::read_json_file(f);
      command = j.value("command", "?");
      description = j.value("description", "");
    } catch (const qcdiff::Error&) {
    }
    std::printf("%-40s %-15s %s\n", f.string().c_str(), command.c_str(), description.c_str());
  }
  return 0;
}

void print_checks(const qcdiff::CaseResult& r) {
  for (const auto& c : r.checks) {
    std::printf("%s  %s: %s (limit %s)", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                qcdiff::format_double(c.value).c_str(), qcdiff::format_double(c.limit).c_str());
    if (!c.detail.empty()) std::printf(" [%s]", c.detail.c_str());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffraction of weighted model sets: verification runs"};
  std::string command, config_path, out_dir;
  int max_n = 0;
  std::uint64_t seed = 0;
  bool list = false;
  app.add_option("command", command, "one of: bupu-check norms s0-isometry psf density fourier-bohr autocorr "
                                     "diffract wiener-diagram")
      ->check(CLI::IsMember(qcdiff::command_names()));
  app.add_option("--config", config_path, "JSON config");
  app.add_option("--out", out_dir, "directory for report.json and CSV artifacts");
  auto* max_n_opt = app.add_option("--max-n", max_n, "truncate van Hove sequences after N stages")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_flag("--list-cases", list, "print the bundled example configs");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (list) return list_cases();
  if (command.empty() || config_path.empty()) {
    std::cerr << "a command and --config are required (see --help)\n";
    return 2;
  }

  qcdiff::RunOptions opt;
  if (!out_dir.empty()) opt.out_dir = fs::path(out_dir);
  opt.config_dir = fs::absolute(config_path).parent_path();
  if (*max_n_opt) opt.max_n = max_n;
  if (*seed_opt) opt.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto config = qcdiff::read_json_file(config_path);
    opt.case_name = config.is_object() && config.contains("name") && config["name"].is_string()
                        ? config["name"].get<std::string>()
                        : fs::path(config_path).stem().string();
    const auto result = qcdiff::run_command(command, config, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    print_checks(result);
    std::printf("%s %s: %zu checks, %s, %.3f s\n", command.c_str(), opt.case_name.c_str(), result.checks.size(),
                result.pass() ? "all pass" : "FAILED", secs);
    return result.pass() ? 0 : 1;
  } catch (const qcdiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return 3;
  }
}
