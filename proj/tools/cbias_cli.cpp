#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cbias/errors.hpp"
#include "cbias/experiments.hpp"

using namespace cbias;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::string out;
  std::string format = "json";
  std::string config;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

std::string render(const ExperimentReport& rep, const std::string& format) {
  if (format == "csv") return rep.to_csv();
  return rep.to_json().dump(2) + "\n";
}

ExperimentConfig load_base(const Globals& g) {
  if (g.config.empty()) return {};
  std::ifstream f(g.config);
  if (!f) throw ConfigError("config file not found: " + g.config);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

std::vector<std::pair<ClassLabel, ClassLabel>> parse_pairs(Family family, const std::vector<std::string>& texts) {
  std::vector<std::pair<ClassLabel, ClassLabel>> out;
  for (const auto& t : texts) {
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw ConfigError("pair must look like C1,C-1: " + t);
    out.emplace_back(parse_class(family, t.substr(0, comma)), parse_class(family, t.substr(comma + 1)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev bias in dihedral and quaternion towers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  auto* samples_opt = app.add_option("--samples", g.samples, "Monte Carlo samples per race")->capture_default_str();
  app.add_option("--out", g.out, "output file (stdout when omitted)");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--config", g.config, "JSON experiment config")->check(CLI::ExistingFile);

  std::string family = "quaternion", scenario_file, zero_dir;
  int n = 3, W = 1, n_max = 8;
  std::vector<int> levels;
  std::vector<std::string> pair_texts;
  std::vector<double> f_values;
  double eps = 0.1, horizon = 20.0;
  std::size_t d_index = 0;
  bool no_fourier = false;

  auto family_options = [&](CLI::App* sub) {
    sub->add_option("--family", family, "dihedral or quaternion")->capture_default_str();
    sub->add_option("--n", n, "top group has order 2^n")->capture_default_str();
    sub->add_option("--W", W, "root number of the symplectic characters")->capture_default_str();
  };
  auto zero_options = [&](CLI::App* sub) {
    sub->add_option("--horizon", horizon, "synthetic zeros up to this height")->capture_default_str();
    sub->add_option("--zero-dir", zero_dir, "read <character>.zeros files instead")->check(CLI::ExistingDirectory);
    sub->add_flag("--no-fourier", no_fourier, "Monte Carlo only");
  };

  std::string table_id;
  auto* table = app.add_subcommand("table", "reproduce a closed-form table (esp-q, esp-d, h8)");
  table->add_option("id", table_id)->required()->check(CLI::IsMember({"esp-q", "esp-d", "h8"}));
  table->add_option("--n-max", n_max, "largest n")->capture_default_str();

  auto* race = app.add_subcommand("race", "ad hoc races on one scenario");
  family_options(race);
  zero_options(race);
  race->add_option("--level", levels, "levels (default: base Q)");
  race->add_option("--pair", pair_texts, "class pair, e.g. C1,C-1 (default: all pairs)");
  race->add_option("--scenario", scenario_file, "scenario file")->check(CLI::ExistingFile);

  auto* horizontal = app.add_subcommand("horizontal", "H8 fields with growing conductor");
  horizontal->add_option("--W", W)->capture_default_str();
  horizontal->add_option("--f", f_values, "f values (default 1 2 3 4)");
  horizontal->add_option("--d-index", d_index)->capture_default_str();
  zero_options(horizontal);

  auto* tower = app.add_subcommand("tower", "classify every base-Q race of a tower");
  family_options(tower);
  zero_options(tower);

  auto* mono = app.add_subcommand("monotonicity", "delta(C1, C-1) across the levels of a tower");
  family_options(mono);
  zero_options(mono);
  mono->add_option("--eps", eps)->capture_default_str();

  auto* zeros = app.add_subcommand("zeros", "synthetic zero files");
  zeros->require_subcommand(1);
  zeros->fallthrough();
  std::string out_dir = ".", character, check_file;
  double log_conductor = -1;
  int degree = 1;
  auto* zgen = zeros->add_subcommand("gen", "write one file per top-level irreducible (and the scenario)");
  family_options(zgen);
  zgen->add_option("--horizon", horizon)->capture_default_str();
  zgen->add_option("--dir", out_dir, "output directory")->capture_default_str();
  zgen->add_option("--character", character, "only this character, e.g. psi1");
  auto* zcheck = zeros->add_subcommand("check", "validate a zero file and compare its count with the main term");
  zcheck->add_option("file", check_file)->required()->check(CLI::ExistingFile);
  zcheck->add_option("--log-conductor", log_conductor, "defaults to the value stored in the file");
  zcheck->add_option("--degree", degree)->capture_default_str();

  std::size_t count = 100;
  double b_max = 3.0;
  auto* calibrate = app.add_subcommand("calibrate", "fit the lower-bound constants c1, c2");
  calibrate->add_option("--count", count)->capture_default_str();
  calibrate->add_option("--b-max", b_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = load_base(g);
    if (seed_opt->count()) cfg.seed = g.seed;
    if (samples_opt->count()) cfg.samples = g.samples;
    auto apply_family = [&](CLI::App* sub) {
      if (sub->count("--family")) cfg.family = parse_family(family);
      if (sub->count("--n")) cfg.n = n;
      if (sub->count("--W")) cfg.W = W;
    };
    auto apply_zeros = [&](CLI::App* sub) {
      if (sub->count("--horizon")) cfg.zeros.horizon = horizon;
      if (!zero_dir.empty()) cfg.zeros.directory = zero_dir;
      if (no_fourier) cfg.fourier = false;
    };

    ExperimentReport rep;
    if (*table) {
      rep = reproduce_table(table_id, n_max);
    } else if (*race) {
      apply_family(race);
      apply_zeros(race);
      cfg.experiment = "race";
      if (!levels.empty()) cfg.levels = levels;
      if (!pair_texts.empty()) cfg.pairs = parse_pairs(cfg.family, pair_texts);
      if (!scenario_file.empty()) cfg.scenario_file = scenario_file;
      rep = run_race(cfg);
    } else if (*horizontal) {
      cfg.experiment = "horizontal";
      if (horizontal->count("--W")) cfg.W = W;
      if (!f_values.empty()) cfg.f_values = f_values;
      if (horizontal->count("--d-index")) cfg.d_index = d_index;
      apply_zeros(horizontal);
      rep = horizontal_experiment(cfg);
    } else if (*tower) {
      apply_family(tower);
      apply_zeros(tower);
      cfg.experiment = cfg.family == Family::Dihedral ? "tabD" : "tabQ";
      rep = run_experiment(cfg);
    } else if (*mono) {
      apply_family(mono);
      apply_zeros(mono);
      cfg.experiment = "monotonicity";
      if (mono->count("--eps")) cfg.eps = eps;
      rep = monotonicity_experiment(cfg);
    } else if (*zgen) {
      apply_family(zgen);
      if (zgen->count("--horizon")) cfg.zeros.horizon = horizon;
      cfg.validate();
      const ArithmeticScenario scenario = scenario_for(cfg);
      std::filesystem::create_directories(out_dir);
      std::vector<CharacterId> ids = irreducible_ids(Group(scenario.kind));
      if (!character.empty()) ids = {parse_character(character)};
      const auto sets = zero_sets_for(scenario, ids, cfg.zeros, cfg.seed);
      for (const auto& [id, zs] : sets) save_zero_file(out_dir + "/" + character_name(id) + ".zeros", zs);
      save_scenario_file(out_dir + "/scenario.txt", scenario);
      std::cerr << "wrote " << sets.size() << " zero files to " << out_dir << '\n';
      return 0;
    } else if (*zcheck) {
      const ZeroSet zs = load_zero_file(check_file);
      zs.validate();
      const double L = log_conductor >= 0 ? log_conductor : zs.log_conductor.value_or(-1.0);
      Json j;
      j["file"] = check_file;
      j["character"] = zs.character;
      j["count"] = zs.ordinates.size();
      j["t_max"] = zs.t_max;
      j["b0"] = b0(zs);
      bool ok = true;
      if (L >= 0) {
        const ZeroCountModel model{L, degree};
        const double expected = expected_zero_count(model, zs.t_max);
        const double tol = zero_error_scale(model, zs.t_max);
        ok = std::abs(static_cast<double>(zs.ordinates.size()) - expected) <= tol;
        j["expected_count"] = expected;
        j["tolerance"] = tol;
      }
      j["ok"] = ok;
      emit(j.dump(2) + "\n", g.out);
      return ok ? 0 : 3;
    } else if (*calibrate) {
      const auto races = sandwich_races(cfg.seed, count, cfg.samples, b_max);
      const auto [c1, c2] = fit_lower_constants(races);
      Json j;
      j["seed"] = cfg.seed;
      j["races"] = races.size();
      j["c1"] = c1;
      j["c2"] = c2;
      j["share_inside"] = sandwich_share(races, c1, c2, cfg.density.c3);
      emit(j.dump(2) + "\n", g.out);
      return 0;
    }
    emit(render(rep, g.format), g.out);
    return rep.internal_inconsistency ? 3 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const RaceUndefined& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
