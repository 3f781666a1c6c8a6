// Runs every criterion of acceptance/manifest.json as one CLI invocation and
// prints one PASS/FAIL line per criterion. A criterion passes when the CLI
// exits 0 and, where a limit is given, finishes within it.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: acceptance <qcdiff binary> <source dir> <work dir>\n";
    return 2;
  }
  const fs::path tool = argv[1], source = argv[2], work = argv[3];
  const auto manifest = nlohmann::json::parse(slurp(source / "acceptance" / "manifest.json"));
  fs::create_directories(work);

  int failures = 0;
  for (const auto& c : manifest.at("criteria")) {
    const int id = c.at("id").get<int>();
    const fs::path out = work / ("criterion" + std::to_string(id));
    const fs::path log = work / ("criterion" + std::to_string(id) + ".log");
    fs::remove_all(out);
    const std::string cmd = quote(tool) + " " + c.at("command").get<std::string>() + " --config " +
                            quote(source / c.at("config").get<std::string>()) + " --out " + quote(out) + " > " +
                            quote(log) + " 2>&1";
    const auto start = std::chrono::steady_clock::now();
    const int raw = std::system(cmd.c_str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;

    std::string why;
    if (status != 0) why = "exit status " + std::to_string(status);
    const auto& limit = c.at("max_seconds");
    if (why.empty() && limit.is_number() && secs > limit.get<double>()) why = "over the time limit";
    const bool pass = why.empty();
    if (!pass) ++failures;

    std::printf("criterion %d: %s  %-62s %8.3f s", id, pass ? "PASS" : "FAIL", c.at("title").get<std::string>().c_str(),
                secs);
    if (limit.is_number()) std::printf(" (limit %g s)", limit.get<double>());
    if (!pass) std::printf("  [%s]", why.c_str());
    std::printf("\n");
    if (!pass) std::printf("%s", slurp(log).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(manifest.at("criteria").size()) - failures,
              manifest.at("criteria").size());
  return failures == 0 ? 0 : 1;
}
