// Command-line driver: wegnerlab ids|wegner|verify|localize [flags]

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wegnerlab/io/commands.hpp"

namespace {

using namespace wegnerlab;

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFault = 3 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> realizations;
  std::optional<unsigned> workers;
  std::string out;
  std::vector<int> lengths;
  std::string fault;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Configuration file (.toml or .json)");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--realizations", f.realizations, "Number of disorder realizations")->check(CLI::PositiveNumber);
  sub->add_option("--workers", f.workers, "Worker threads (default: WEGNERLAB_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "Output directory (default: out/<command>)");
  sub->add_option("--l", f.lengths, "Box length; repeat for several")->check(CLI::PositiveNumber);
  sub->add_option("--inject-fault", f.fault)->group("")->check(CLI::IsMember({"neumann-sign"}));
}

io::RunConfig resolve(const std::string& command, const Flags& f) {
  auto c = f.config.empty() ? io::default_config() : io::load_config(f.config);
  c.command = command;
  if (f.seed) c.seed = *f.seed;
  if (f.realizations) c.realizations = *f.realizations;
  if (f.workers) c.workers = *f.workers;
  if (!f.lengths.empty()) {
    if (command == "wegner")
      c.wegner.lengths = f.lengths;
    else if (command == "verify")
      c.verify.lengths = f.lengths;
    else if (command == "localize")
      c.localize.box_length = f.lengths.front();
    else
      c.lengths = f.lengths;
    c.grid.box_length = c.lengths.front();
  }
  if (f.fault == "neumann-sign") c.fault = Fault::neumann_sign;
  c.out = f.out.empty() ? "out/" + command : f.out;
  return c;
}

std::string joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wegner estimate and localization experiments for alloy-type random potentials"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ids", "Averaged integrated density of states"},
      {"wegner", "Wegner trace statistic over window widths and box lengths"},
      {"verify", "Numerical checks of the bound's ingredients"},
      {"localize", "Lyapunov exponents and eigenfunction decay"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto config = resolve(command, flags);
    const std::string line = joined(argc, argv);
    io::ResultBundle bundle;
    if (command == "ids")
      bundle = io::cmd_ids(config, line);
    else if (command == "wegner")
      bundle = io::cmd_wegner(config, line);
    else if (command == "verify")
      bundle = io::cmd_verify(config, line);
    else
      bundle = io::cmd_localize(config, line);
    io::write_bundle(bundle, config.out);
    std::cout << bundle.report << "manifest " << bundle.manifest.config_digest << " -> " << config.out << '\n';
    return bundle.status == 0 ? kOk : kVerifyFailed;
  } catch (const io::ConfigFileError& e) {
    std::cerr << "config error: " << e.diagnostic().str() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << (e.field().empty() ? "" : e.field() + ": ") << e.what() << '\n';
    return kConfigError;
  } catch (const CapacityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const EnsembleFailure& e) {
    std::cerr << "numerical fault: " << e.what() << '\n';
    return kNumericalFault;
  } catch (const NumericalFault& e) {
    std::cerr << "numerical fault: " << e.what() << '\n';
    return kNumericalFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFault;
  }
}
