// entropic_spectra run --config FILE [--key value ...]
// entropic_spectra compare --configs FILE1,FILE2,...
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "entropic/experiment.hpp"

namespace ex = entropic::experiment;

namespace {

// Leftover "--key value" / "--key=value" tokens become config overrides.
ex::Overrides collect_overrides(const std::vector<std::string>& extras) {
  ex::Overrides out;
  for (std::size_t k = 0; k < extras.size(); ++k) {
    const std::string& token = extras[k];
    if (token.rfind("--", 0) != 0 || token.size() <= 2)
      throw ex::ConfigError("unexpected argument '" + token + "'");
    const std::string body = token.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (k + 1 >= extras.size()) throw ex::ConfigError("flag --" + body + " needs a value");
      out.emplace_back(body, extras[++k]);
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic mirror descent on spectrahedra"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment and write its trace CSV");
  run_cmd->add_option("--config", config_path, "key=value config file");
  run_cmd->allow_extras();

  std::string config_list;
  auto* compare_cmd = app.add_subcommand("compare", "Summarize several experiments on the same problem");
  compare_cmd->add_option("--configs", config_list, "comma-separated config files")->required();
  compare_cmd->allow_extras();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto overrides = collect_overrides(run_cmd->remaining());
      const auto config = config_path.empty() ? ex::parse_config("", overrides) : ex::load_config(config_path, overrides);
      return ex::run(config, std::cerr);
    }
    const auto overrides = collect_overrides(compare_cmd->remaining());
    std::vector<ex::ExperimentConfig> configs;
    for (const auto& path : split_list(config_list)) {
      configs.push_back(ex::load_config(path, overrides));
      const auto violations = ex::validate(configs.back());
      if (!violations.empty()) {
        std::cerr << path << ": invalid config:\n";
        for (const auto& v : violations) std::cerr << "  " << v << '\n';
        return 1;
      }
    }
    std::cout << ex::format_compare(ex::compare(configs));
    return 0;
  } catch (const ex::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
