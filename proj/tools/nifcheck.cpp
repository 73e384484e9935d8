#include <CLI11.hpp>
#include <iostream>

#include "nif/capability.hpp"
#include "nif/io.hpp"
#include "nif/report.hpp"

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int replay(const nif::cap::CapConfig& config, const std::string& path) {
  using namespace nif::cap;
  const auto script = parse_trace_script(nif::read_file(path), config);
  CapabilityState s = config.initial;
  std::cout << "initial: " << format_state(s, config.tags) << '\n';
  for (const auto& a : script) {
    s = cap_step(config.tags, s, a);
    std::cout << action_name(a, config.tags) << ": " << format_state(s, config.tags) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded checker for dynamic intransitive noninterference"};
  std::string file;
  std::string properties = "mayta,unwinding";
  nif::RunOptions opt;
  std::optional<std::string> variant;
  std::string mode = "box";
  std::string locality = "pairwise";
  std::optional<std::string> policy_domain;
  std::optional<std::string> replay_path;
  bool json = false;
  bool serial = false;
  bool print = false;

  app.add_option("file", file, ".nif system file or .cap capability configuration")->required();
  app.add_option("--property,-p", properties, "comma list of properties: ta, mayta, mustta, unwinding, locality, "
                                              "static, gk, lpurge, isec, drm, theorem-mustunwind, certify")
      ->capture_default_str();
  app.add_option("--depth,-k", opt.depth, "trace depth bound")->capture_default_str();
  app.add_option("--margin", opt.margin, "boundary margin for theorem-mustunwind")->capture_default_str();
  app.add_option("--variant", variant, "edge-set variant declared in the .nif file");
  app.add_option("--mode", mode, "state-level certification mode for certify")
      ->check(CLI::IsMember({"box", "diamond"}))
      ->capture_default_str();
  app.add_option("--policy-domain", policy_domain, "policy-holding domain for gk");
  app.add_option("--locality-variant", locality, "locality variant")
      ->check(CLI::IsMember({"pairwise", "sender", "receiver"}))
      ->capture_default_str();
  app.add_option("--replay", replay_path, "replay a .trace script against a .cap configuration and exit");
  app.add_flag("--json", json, "print the JSON report");
  app.add_flag("--serial", serial, "use the serial kernels");
  app.add_flag("--print", print, "print the (selected) system in .nif form and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    opt.properties = split_list(properties);
    opt.mode = mode == "box" ? nif::StateUnwindingMode::Box : nif::StateUnwindingMode::Diamond;
    opt.locality = locality == "pairwise" ? nif::LocalityVariant::Pairwise
                   : locality == "sender"  ? nif::LocalityVariant::KnownToSender
                                           : nif::LocalityVariant::KnownToReceiver;
    opt.policy_domain = policy_domain;
    opt.exec = serial ? nif::Exec::Serial : nif::Exec::Parallel;

    const std::string text = nif::read_file(file);
    nif::PolicyEnhancedSystem sys;
    nif::DrmSource drm_source;
    std::optional<nif::cap::CapConfig> config;
    std::optional<nif::cap::CapabilityPes> built;
    std::vector<std::string> notes;
    if (ends_with(file, ".cap")) {
      config = nif::cap::parse_cap_config(text);
      if (replay_path) return replay(*config, *replay_path);
      if (variant) throw nif::InputError("--variant applies to .nif files only");
      built = nif::cap::build_pes(*config, opt.depth);
      sys = built->pes;
      notes.push_back("capability system: " + std::to_string(built->states.size()) + " states reachable within depth " +
                      std::to_string(opt.depth) + ", " + std::to_string(config->alphabet.size()) + " actions");
      drm_source = [&](std::vector<std::string>&) { return nif::cap::capability_drm_interpretation(*built, *config); };
    } else {
      if (replay_path) throw nif::InputError("--replay needs a .cap configuration");
      sys = nif::parse_system(text, variant);
    }
    if (print) {
      std::cout << nif::print_system(sys);
      return 0;
    }
    nif::Report rep = nif::run_checks(sys, opt, drm_source);
    rep.input = file;
    rep.digest = nif::input_digest(text);
    rep.variant = variant;
    rep.notes.insert(rep.notes.begin(), notes.begin(), notes.end());
    if (json)
      std::cout << nif::to_json(rep, sys).dump(2) << '\n';
    else
      std::cout << nif::to_text(rep, sys);
    return nif::exit_code(rep);
  } catch (const nif::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const nif::StructuralError& e) {
    std::cerr << "structural error: " << e.what() << '\n';
    return 2;
  } catch (const nif::BoundError& e) {
    std::cerr << "bound error: " << e.what() << '\n';
    return 2;
  }
}
