#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "nasmr/adversary.hpp"
#include "nasmr/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nasmr::ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nasmr::ConfigError("cannot write " + path);
  out << text;
}

nasmr::ScenarioConfig load_config(const std::string& path) {
  auto cfg = nasmr::ScenarioConfig::from_text(read_file(path));
  cfg.validate();
  return cfg;
}

bool parse_seed_range(const std::string& s, std::uint64_t& a, std::uint64_t& b) {
  auto pos = s.find("..");
  if (pos == std::string::npos) return false;
  a = std::stoull(s.substr(0, pos));
  b = std::stoull(s.substr(pos + 2));
  return a <= b;
}

int cmd_run(const std::string& config_path, const std::string& out_path) {
  auto cfg = load_config(config_path);
  auto result = nasmr::run_scenario(cfg);
  if (!out_path.empty()) {
    write_file(out_path, result.transcript_text);
  } else {
    std::cout << result.transcript_text;
  }
  std::cerr << "transcript digest " << result.transcript_digest.hex() << "\n";
  return 0;
}

int cmd_check(const std::string& transcript_path, const std::string& report_path) {
  auto parsed = nasmr::parse_transcript(read_file(transcript_path));
  if (!parsed) {
    std::cerr << "error: transcript is not parsable\n";
    return 2;
  }
  auto cfg = nasmr::ScenarioConfig::from_text(parsed->config_text);
  auto report = nasmr::run_checks(*parsed, cfg);
  const std::string text = report.render();
  if (!report_path.empty()) {
    write_file(report_path, text);
  }
  std::cout << text;
  return report.all_pass() ? 0 : 1;
}

int cmd_replay(const std::string& transcript_path) {
  std::string note;
  const bool ok = nasmr::replay_matches(read_file(transcript_path), &note);
  std::cout << "replay\t" << (ok ? "pass" : "fail") << "\t" << note << "\n";
  return ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds,
              const std::string& report_path, unsigned jobs) {
  auto base = load_config(config_path);
  std::uint64_t a = 0, b = 0;
  if (!parse_seed_range(seeds, a, b)) {
    std::cerr << "error: --seeds must be a..b\n";
    return 2;
  }
  const std::size_t count = b - a + 1;
  struct PerSeed {
    bool pass = false;
    std::string line;
  };
  std::vector<PerSeed> results(count);

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        nasmr::ScenarioConfig cfg = base;
        cfg.net.seed = a + i;
        auto run = nasmr::run_scenario(cfg);
        auto parsed = nasmr::parse_transcript(run.transcript_text);
        auto rep = nasmr::run_checks(*parsed, cfg);
        PerSeed& out = results[i];
        out.pass = rep.all_pass();
        out.line = "seed\t" + std::to_string(cfg.net.seed) + "\t" +
                   (out.pass ? "pass" : "fail") + "\t" + run.transcript_digest.hex();
        for (const auto& r : rep.results) {
          if (!r.pass) out.line += "\t" + r.name;
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  std::string text;
  std::size_t passed = 0;
  for (const auto& r : results) {
    text += r.line + "\n";
    if (r.pass) ++passed;
  }
  text += "sweep\t" + std::to_string(passed) + "/" + std::to_string(count) + " pass\n";
  if (!report_path.empty()) write_file(report_path, text);
  std::cout << text;
  return passed == count ? 0 : 1;
}

int cmd_demo(const std::string& config_path, const std::string& out_path) {
  auto cfg = load_config(config_path);
  auto demo = nasmr::demo_lower_bound(cfg);
  if (!out_path.empty()) write_file(out_path, demo.run.transcript_text);
  std::cout << demo.report.render();
  return demo.report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network-agnostic BFT consensus toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, report_path, transcript_path, seeds;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "run one scenario and write its transcript");
  run->add_option("config", config_path)->required();
  run->add_option("--out", out_path, "transcript file (stdout if omitted)");

  auto* check = app.add_subcommand("check", "run the registered checks over a transcript");
  check->add_option("transcript", transcript_path)->required();
  check->add_option("--report", report_path, "report file");

  auto* replay = app.add_subcommand("replay", "re-execute a transcript and byte-compare");
  replay->add_option("transcript", transcript_path)->required();

  auto* sweep = app.add_subcommand("sweep", "run a seed range and aggregate check results");
  sweep->add_option("config", config_path)->required();
  sweep->add_option("--seeds", seeds, "inclusive range a..b")->required();
  sweep->add_option("--report", report_path, "report file");
  sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");

  auto* demo = app.add_subcommand("demo-lower-bound",
                                  "split-world experiment for t_a + 2*t_s >= n");
  demo->add_option("config", config_path)->required();
  demo->add_option("--out", out_path, "transcript file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path);
    if (check->parsed()) return cmd_check(transcript_path, report_path);
    if (replay->parsed()) return cmd_replay(transcript_path);
    if (sweep->parsed()) return cmd_sweep(config_path, seeds, report_path, jobs);
    if (demo->parsed()) return cmd_demo(config_path, out_path);
  } catch (const nasmr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
