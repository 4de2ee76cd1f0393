// SPDX-License-Identifier: Apache-2.0
//
// haarlab <command> --config <file> [--format csv|json] [--out <file>]
//
// Exit codes: 0 success, 2 config error, 3 computation error, 4 cap
// exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "haarlab/commands.hpp"

namespace {

constexpr const char* kCommands[] = {"group-info", "lucas",      "rank-traj", "diffusion-report",
                                     "separating", "ledrappier", "fourier",   "ehm-lambda",
                                     "cesaro",     "hm-scan",    "mrf-check", "simulate"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw haarlab::config_error("config: cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact character calculus for linear cellular automata over finite abelian groups"};
  app.require_subcommand(1);

  std::string config_path, config_inline, format = "csv", out_path;
  std::vector<std::int64_t> lucas_args;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--config-json", config_inline, "inline JSON config text");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "output file (default stdout)");
    if (std::string(name) == "lucas")
      sub->add_option("args", lucas_args, "N n p")->expected(0, 3);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    std::string text = "{}";
    if (!config_path.empty())
      text = read_file(config_path);
    else if (!config_inline.empty())
      text = config_inline;
    haarlab::RunConfig cfg = haarlab::load_config(text);
    if (name == "lucas" && lucas_args.size() == 3) {
      haarlab::LucasCfg l;
      l.N = lucas_args[0];
      l.n = lucas_args[1];
      l.p = lucas_args[2];
      cfg.analysis.lucas = l;
    } else if (name == "lucas" && !lucas_args.empty()) {
      throw haarlab::config_error("lucas: positional form needs exactly N n p");
    }
    haarlab::Report rep = haarlab::run_command(name, cfg);
    std::string bytes = haarlab::emit_report(rep, haarlab::parse_format(format));
    if (out_path.empty()) {
      std::cout << bytes;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw haarlab::computation_error("cannot write \"" + out_path + "\"");
      out << bytes;
    }
    for (const std::string& w : rep.warnings) std::cerr << "note: " << w << "\n";
    return 0;
  } catch (const haarlab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const haarlab::cap_error& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
