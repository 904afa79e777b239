// polysample: batch front end for the polygon samplers.
//
//   polysample sample    --n 6 --steps 1000 --seed 7 --output-dir out
//   polysample integrate --n 23 --observable total_curvature --steps 200000
//   polysample reference --table total_curvature --n-max 20
//   polysample polytope  --kind slab --n 3 --slab-height 2 --samples 1000000
//   polysample knotscan  --steps 2000000 --seed 1
//
// Every command writes manifest.json into --output-dir. A --config file of
// key=value lines supplies defaults for any flag not given explicitly.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polysample/polysample.hpp"

#ifndef POLYSAMPLE_VERSION
#define POLYSAMPLE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polysample;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void write_json(const fs::path& path, const json& j) { open_output(path) << j.dump(2) << '\n'; }

/// Whitespace-separated lengths, '#' comments.
EdgeLengths read_edge_lengths(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read edge-length file " + file);
  std::vector<double> r;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw std::runtime_error("edge-length file " + file + ": bad number '" + token + "'");
      r.push_back(x);
    }
  }
  return EdgeLengths(std::move(r));
}

json counters_json(const ChainCounters& c) {
  return {{"polytope_steps", c.polytope_steps},
          {"hit_and_run_moves", c.hit_and_run_moves},
          {"dihedral_steps", c.dihedral_steps},
          {"permutation_steps", c.permutation_steps},
          {"permutation_rejections", c.permutation_rejections}};
}

// Flags shared by the chain-based commands.
struct ChainFlags {
  int n = 0;
  std::string edge_lengths_file;
  std::string triangulation = "spiral";
  std::uint64_t triangulation_seed = 0;
  double beta = 0.5;
  double delta = 0.0;
  int hr_multiplicity = 10;
  std::uint64_t steps = 1000;
  std::optional<std::uint64_t> burnin;
  std::uint64_t seed = 0;
  std::optional<double> confine_radius;
  int chains = 1;

  CLI::Option* triangulation_option = nullptr;

  void add_to(CLI::App& app) {
    app.add_option("--n", n, "number of edges")->required()->check(CLI::Range(4, 100000));
    app.add_option("--edge-lengths", edge_lengths_file, "file of edge lengths (default: all 1)")
        ->check(CLI::ExistingFile);
    triangulation_option = app.add_option("--triangulation", triangulation, "fan, spiral, teeth or random")
                               ->capture_default_str();
    app.add_option("--triangulation-seed", triangulation_seed, "seed for --triangulation random");
    app.add_option("--beta", beta, "probability of a moment-polytope step")->capture_default_str();
    app.add_option("--delta", delta, "probability of a permutation step")->capture_default_str();
    app.add_option("--hr-multiplicity", hr_multiplicity, "hit-and-run moves per polytope step")
        ->capture_default_str();
    app.add_option("--steps", steps, "recorded steps per chain")->capture_default_str();
    app.add_option("--burnin", burnin, "discarded steps (default 10 n)");
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--confine-radius", confine_radius, "keep every vertex within this distance of v_1");
    app.add_option("--chains", chains, "independent chains")->check(CLI::PositiveNumber)->capture_default_str();
  }

  McmcConfig config(std::uint64_t chain_seed) const {
    McmcConfig c;
    c.n = n;
    if (!edge_lengths_file.empty()) c.edge_lengths = read_edge_lengths(edge_lengths_file);
    c.triangulation = parse_triangulation_kind(triangulation);
    // Confined runs live on the fan polytope.
    if (confine_radius && triangulation_option->count() == 0) c.triangulation = TriangulationKind::Fan;
    c.triangulation_seed = triangulation_seed;
    c.beta = beta;
    c.delta = delta;
    c.hr_multiplicity = hr_multiplicity;
    c.steps = steps;
    c.burnin = burnin;
    c.seed = chain_seed;
    c.confine_radius = confine_radius;
    c.validate();
    return c;
  }

  /// Seed of chain i: the run seed itself for a single chain.
  std::uint64_t chain_seed(int i) const {
    return chains == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(i) + 1);
  }
};

json config_json(const McmcConfig& c) {
  json j{{"n", c.n},
         {"edge_lengths", c.lengths().values()},
         {"triangulation", std::string(to_string(c.triangulation))},
         {"triangulation_seed", c.triangulation_seed},
         {"beta", c.beta},
         {"delta", c.delta},
         {"hr_multiplicity", c.hr_multiplicity},
         {"steps", c.steps},
         {"burnin", c.burnin_steps()},
         {"seed", c.seed}};
  j["confine_radius"] = c.confine_radius ? json(*c.confine_radius) : json(nullptr);
  return j;
}

struct Manifest {
  std::string command;
  json flags = json::object();
  std::string started = utc_now();

  json finish(json extra) const {
    json j{{"command", command}, {"version", POLYSAMPLE_VERSION}, {"flags", flags},
           {"started", started}, {"finished", utc_now()}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

/// Records every flag the user could have set, as parsed.
json echo_flags(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const auto results = opt->results();
    if (results.empty()) continue;
    j[name] = results.size() == 1 ? json(results.front()) : json(results);
  }
  return j;
}

std::vector<Observable> build_observables(const std::vector<std::string>& names, std::uint64_t seed) {
  std::vector<Observable> out;
  for (const auto& name : names) out.push_back(name == "knot" ? make_knot_observable(seed) : make_observable(name));
  return out;
}

// Runs the configured chains on worker threads; chain i writes into
// dirs[i] through the callbacks built by make_sink.
template <class Body>
void run_chains(int chains, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::vector<std::thread> workers;
  for (int i = 0; i < chains; ++i) {
    workers.emplace_back([&, i] {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

fs::path chain_dir(const fs::path& out, int chains, int i) {
  return chains == 1 ? out : out / ("chain_" + std::to_string(i));
}

// ---------------------------------------------------------------------------
// sample

struct SampleCommand {
  ChainFlags chain;
  std::string output_dir = "polysample_out";
  std::string format = "csv";
  std::vector<std::string> observables;
  bool write_polygons = true;

  void add_to(CLI::App& app) {
    chain.add_to(app);
    app.add_option("--output-dir", output_dir)->capture_default_str();
    app.add_option("--format", format, "coordinate output: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--observable", observables, "observables to record in series.csv");
    app.add_flag("!--no-polygons", write_polygons, "skip polygons.txt");
  }

  void run(const CLI::App& app) const {
    Manifest manifest{"sample", echo_flags(app)};
    const fs::path out(output_dir);
    json chain_manifests = json::array();
    std::vector<json> per_chain(static_cast<std::size_t>(chain.chains));
    run_chains(chain.chains, [&](int i) {
      const McmcConfig cfg = chain.config(chain.chain_seed(i));
      const fs::path dir = chain_dir(out, chain.chains, i);
      fs::create_directories(dir);
      const std::string started = utc_now();
      std::ofstream polygons;
      if (write_polygons) polygons = open_output(dir / "polygons.txt");
      std::ofstream coords = open_output(dir / (format == "csv" ? "coords.csv" : "coords.jsonl"));
      const int k = cfg.n - 3;
      if (format == "csv") {
        coords << "step";
        for (int j = 1; j <= k; ++j) coords << ",d" << j;
        for (int j = 1; j <= k; ++j) coords << ",theta" << j;
        coords << '\n';
      }
      const auto res = run_chain(cfg, build_observables(observables, cfg.seed),
                                 [&](std::uint64_t step, const Polygon& p, const ActionAngle& aa) {
                                   if (write_polygons) {
                                     if (step > 0) polygons << '\n';
                                     write_polygon(polygons, p);
                                   }
                                   if (format == "csv") {
                                     coords << step;
                                     for (int j = 0; j < k; ++j) coords << ',' << aa.d[j];
                                     for (int j = 0; j < k; ++j) coords << ',' << aa.theta[j];
                                     coords << '\n';
                                   } else {
                                     coords << json{{"step", step},
                                                    {"d", std::vector<double>(aa.d.data(), aa.d.data() + k)},
                                                    {"theta", std::vector<double>(aa.theta.data(), aa.theta.data() + k)}}
                                                   .dump()
                                            << '\n';
                                   }
                                 });
      json summaries = json::object();
      if (!observables.empty()) {
        std::ofstream series = open_output(dir / "series.csv");
        series << "step";
        for (const auto& name : res.names) series << ',' << name;
        series << '\n';
        for (std::size_t s = 0; s < cfg.steps; ++s) {
          series << s;
          for (const auto& col : res.series) series << ',' << col[s];
          series << '\n';
        }
        if (cfg.steps >= 4)
          for (std::size_t o = 0; o < res.names.size(); ++o) summaries[res.names[o]] = to_json(ips_variance(res.series[o]));
      }
      json m{{"config", config_json(cfg)},
             {"counters", counters_json(res.counters)},
             {"wall_seconds", res.wall_seconds},
             {"chain_started", started},
             {"ips", summaries}};
      per_chain[static_cast<std::size_t>(i)] = m;
      if (chain.chains > 1) write_json(dir / "manifest.json", manifest.finish(m));
    });
    json top = chain.chains == 1 ? per_chain[0] : json{{"chains", per_chain}};
    write_json(out / "manifest.json", manifest.finish(top));
    std::cout << "wrote " << (out / "manifest.json").string() << '\n';
  }
};

// ---------------------------------------------------------------------------
// integrate

struct IntegrateCommand {
  ChainFlags chain;
  std::vector<std::string> observables{"total_curvature"};
  std::string output_dir;

  void add_to(CLI::App& app) {
    chain.add_to(app);
    app.add_option("--observable", observables,
                   "total_curvature, chord:k, squared_chord:k, zwidth, octant6 or knot")
        ->capture_default_str();
    app.add_option("--output-dir", output_dir, "also write report.json and manifest.json here");
  }

  void run(const CLI::App& app) const {
    Manifest manifest{"integrate", echo_flags(app)};
    for (const auto& name : observables)
      if (name != "knot") make_observable(name);  // fail before sampling
    std::vector<json> per_chain(static_cast<std::size_t>(chain.chains));
    std::vector<std::vector<IpsSummary>> summaries(static_cast<std::size_t>(chain.chains));
    run_chains(chain.chains, [&](int i) {
      const McmcConfig cfg = chain.config(chain.chain_seed(i));
      if (cfg.steps < 4) throw std::invalid_argument("integrate: need at least 4 steps");
      const auto res = run_chain(cfg, build_observables(observables, cfg.seed));
      json ips = json::object();
      for (std::size_t o = 0; o < res.names.size(); ++o) {
        summaries[static_cast<std::size_t>(i)].push_back(ips_variance(res.series[o]));
        ips[res.names[o]] = to_json(summaries[static_cast<std::size_t>(i)].back());
      }
      per_chain[static_cast<std::size_t>(i)] = {{"config", config_json(cfg)},
                                                {"counters", counters_json(res.counters)},
                                                {"wall_seconds", res.wall_seconds},
                                                {"ips", ips}};
    });
    json report = json::object();
    for (std::size_t o = 0; o < observables.size(); ++o) {
      if (chain.chains == 1) {
        report[observables[o]] = to_json(summaries[0][o]);
        continue;
      }
      // Equal-length independent chains: average of chain means, variance
      // of the average from the per-chain IPS estimates.
      double mean = 0.0, var = 0.0;
      json chains = json::array();
      for (const auto& s : summaries) {
        mean += s[o].mean;
        var += s[o].sigma_sq / static_cast<double>(s[o].m);
        chains.push_back(to_json(s[o]));
      }
      const double k = static_cast<double>(chain.chains);
      report[observables[o]] = {{"mean", mean / k}, {"half_width_95", 1.96 * std::sqrt(var) / k}, {"chains", chains}};
    }
    std::cout << std::setprecision(17) << report.dump(2) << '\n';
    if (!output_dir.empty()) {
      fs::create_directories(output_dir);
      write_json(fs::path(output_dir) / "report.json", report);
      json top = chain.chains == 1 ? per_chain[0] : json{{"chains", per_chain}};
      write_json(fs::path(output_dir) / "manifest.json", manifest.finish(top));
    }
  }
};

// ---------------------------------------------------------------------------
// reference

struct ReferenceCommand {
  std::string table = "total_curvature";
  int n_min = 3;
  int n_max = 20;
  int n = 6;
  int points = 200;
  std::string output_dir;

  void add_to(CLI::App& app) {
    app.add_option("--table", table,
                   "total_curvature, c_n, equilateral_volume, half_space_volume, squared_chord, end_to_end_pdf, "
                   "ftc_pdf")
        ->check(CLI::IsMember({"total_curvature", "c_n", "equilateral_volume", "half_space_volume", "squared_chord",
                               "end_to_end_pdf", "ftc_pdf"}))
        ->capture_default_str();
    app.add_option("--n-min", n_min, "first n of a table over n")->capture_default_str();
    app.add_option("--n-max", n_max, "last n of a table over n")->capture_default_str();
    app.add_option("--n", n, "n for squared_chord and the pdf tables")->capture_default_str();
    app.add_option("--points", points, "grid points for the pdf tables")->capture_default_str();
    app.add_option("--output-dir", output_dir, "write <table>.csv and manifest.json here instead of stdout");
  }

  void emit(std::ostream& out) const {
    out << std::setprecision(17);
    auto over_n = [&](int lo) { return std::max(n_min, lo); };
    if (table == "total_curvature") {
      out << "n,expected_total_curvature,asymptotic_n_pi_over_2_plus_3_pi_over_8\n";
      for (int m = over_n(3); m <= n_max; ++m) out << m << ',' << expected_total_curvature(m) << ',' << grosberg_asymptotic(m) << '\n';
    } else if (table == "c_n") {
      out << "n,c_n_times_pi_exact,c_n\n";
      for (int m = over_n(4); m <= n_max; ++m) out << m << ',' << c_n_rational(m).get_str() << ',' << c_n(m) << '\n';
    } else if (table == "equilateral_volume") {
      out << "n,volume_over_2pi_pow_n_minus_3_exact,volume\n";
      for (int m = over_n(4); m <= n_max; ++m)
        out << m << ',' << equilateral_volume_coefficient(m).get_str() << ',' << equilateral_volume(m) << '\n';
    } else if (table == "half_space_volume") {
      out << "n,volume_exact,volume\n";
      for (int m = over_n(1); m <= n_max; ++m) {
        const mpq_class v = half_space_volume(m);
        out << m << ',' << v.get_str() << ',' << exact::to_double(v) << '\n';
      }
    } else if (table == "squared_chord") {
      out << "k,n,expected_squared_chord_exact,expected_squared_chord\n";
      for (int k = 2; k <= n - 2; ++k) {
        const mpq_class v = expected_squared_chord(k, n);
        out << k << ',' << n << ',' << v.get_str() << ',' << exact::to_double(v) << '\n';
      }
    } else {
      const bool e2e = table == "end_to_end_pdf";
      out << (e2e ? "l,end_to_end_density\n" : "l,closure_density_in_space\n");
      for (int i = 0; i <= points; ++i) {
        const double l = static_cast<double>(n) * i / points;
        double v = 0.0;
        if (e2e) {
          v = end_to_end_pdf(l, n);
        } else {
          v = l > 0.0 ? ftc_pdf(l, n) : (n >= 4 ? c_n(n) : NAN);
        }
        out << l << ',' << v << '\n';
      }
    }
  }

  void run(const CLI::App& app) const {
    if (output_dir.empty()) {
      emit(std::cout);
      return;
    }
    Manifest manifest{"reference", echo_flags(app)};
    fs::create_directories(output_dir);
    std::ofstream out = open_output(fs::path(output_dir) / (table + ".csv"));
    emit(out);
    write_json(fs::path(output_dir) / "manifest.json", manifest.finish(json::object()));
  }
};

// ---------------------------------------------------------------------------
// polytope

struct PolytopeCommand {
  std::string kind = "fan";
  int n = 5;
  std::string edge_lengths_file;
  std::string triangulation = "fan";
  std::optional<double> confine_radius;
  double slab_height = 1.0;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  bool as_probability = false;
  std::string centroid_method = "rejection";
  std::string output_dir;

  void add_to(CLI::App& app) {
    app.add_option("--kind", kind, "fan, triangulation, hyperbox, slab or half_space")
        ->check(CLI::IsMember({"fan", "triangulation", "hyperbox", "slab", "half_space"}))
        ->capture_default_str();
    app.add_option("--n", n)->capture_default_str();
    app.add_option("--edge-lengths", edge_lengths_file)->check(CLI::ExistingFile);
    app.add_option("--triangulation", triangulation, "for --kind triangulation")->capture_default_str();
    app.add_option("--confine-radius", confine_radius, "for --kind fan: add d_i <= R");
    app.add_option("--slab-height", slab_height, "for --kind slab")->capture_default_str();
    app.add_option("--samples", samples, "oracle samples")->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_flag("--as-probability", as_probability, "also report volume / 2^n (slab and half_space)");
    app.add_option("--centroid-method", centroid_method, "rejection or hit_and_run")
        ->check(CLI::IsMember({"rejection", "hit_and_run"}))
        ->capture_default_str();
    app.add_option("--output-dir", output_dir, "also write polytope.json and manifest.json here");
  }

  HPolytope build() const {
    const EdgeLengths r = edge_lengths_file.empty() ? EdgeLengths::equilateral(n) : read_edge_lengths(edge_lengths_file);
    if (kind == "fan") return confine_radius ? confined_fan_polytope(n, r, *confine_radius) : fan_polytope(n, r);
    if (kind == "triangulation") return triangulation_polytope(make_triangulation(parse_triangulation_kind(triangulation), n, seed), r);
    if (kind == "hyperbox") return hyperbox(r);
    if (kind == "slab") return slab_polytope(n, slab_height);
    return half_space_polytope(n);
  }

  void run(const CLI::App& app) const {
    Manifest manifest{"polytope", echo_flags(app)};
    const HPolytope P = build();
    auto rng = make_rng(seed);
    const auto vol = rejection_volume_estimate(P, rng, samples);
    const auto method = centroid_method == "rejection" ? CentroidMethod::Rejection : CentroidMethod::HitAndRun;
    const auto cen = centroid_estimate(P, rng, samples, method);
    json j{{"rows", P.rows()},
           {"dim", P.dim()},
           {"volume", vol.volume},
           {"volume_stderr", vol.stderr_},
           {"centroid", std::vector<double>(cen.mean.data(), cen.mean.data() + cen.mean.size())},
           {"centroid_stderr", std::vector<double>(cen.stderr_.data(), cen.stderr_.data() + cen.stderr_.size())},
           {"samples", samples},
           {"seed", seed}};
    if (as_probability) {
      if (kind != "slab" && kind != "half_space") throw std::invalid_argument("--as-probability applies to slab and half_space");
      const double cube = std::ldexp(1.0, P.dim());
      j["probability"] = vol.volume / cube;
      j["probability_stderr"] = vol.stderr_ / cube;
    }
    std::cout << std::setprecision(17) << j.dump(2) << '\n';
    if (!output_dir.empty()) {
      fs::create_directories(output_dir);
      write_json(fs::path(output_dir) / "polytope.json", j);
      write_json(fs::path(output_dir) / "manifest.json", manifest.finish({{"result", j}}));
    }
  }
};

// ---------------------------------------------------------------------------
// knotscan

struct KnotscanCommand {
  ChainFlags chain;
  std::string output_dir = "knotscan_out";
  bool all_rows = false;

  KnotscanCommand() {
    chain.n = 6;
    chain.delta = 0.9;
    chain.steps = 1000000;
  }

  void add_to(CLI::App& app) {
    chain.add_to(app);
    app.get_option("--n")->required(false)->capture_default_str();
    app.add_option("--output-dir", output_dir)->capture_default_str();
    app.add_flag("--all-rows", all_rows, "write every sample to knots.csv, not only knotted ones");
  }

  void run(const CLI::App& app) const {
    Manifest manifest{"knotscan", echo_flags(app)};
    const fs::path out(output_dir);
    std::vector<json> per_chain(static_cast<std::size_t>(chain.chains));
    std::vector<std::vector<double>> indicators(static_cast<std::size_t>(chain.chains));
    run_chains(chain.chains, [&](int i) {
      const McmcConfig cfg = chain.config(chain.chain_seed(i));
      const fs::path dir = chain_dir(out, chain.chains, i);
      fs::create_directories(dir);
      std::ofstream csv = open_output(dir / "knots.csv");
      csv << "index,determinant,is_knotted\n";
      auto proj_rng = make_rng(cfg.seed, 0x6b6e6f74ULL);
      auto& ind = indicators[static_cast<std::size_t>(i)];
      ind.reserve(static_cast<std::size_t>(cfg.steps));
      const auto res = run_chain(cfg, {}, [&](std::uint64_t step, const Polygon& p, const ActionAngle&) {
        const mpz_class det = knot_determinant(p, proj_rng);
        const bool knotted = det != 1;
        ind.push_back(knotted ? 1.0 : 0.0);
        if (knotted || all_rows) csv << step << ',' << det.get_str() << ',' << (knotted ? 1 : 0) << '\n';
      });
      json m{{"config", config_json(cfg)}, {"counters", counters_json(res.counters)}, {"wall_seconds", res.wall_seconds}};
      if (ind.size() >= 4) m["ips"] = to_json(ips_variance(ind));
      per_chain[static_cast<std::size_t>(i)] = m;
      if (chain.chains > 1) write_json(dir / "manifest.json", manifest.finish(m));
    });
    std::vector<double> pooled;
    for (const auto& ind : indicators) pooled.insert(pooled.end(), ind.begin(), ind.end());
    double knots = 0.0;
    for (double x : pooled) knots += x;
    json summary{{"samples", pooled.size()}, {"knotted", static_cast<std::uint64_t>(knots)}};
    summary["frequency"] = pooled.empty() ? 0.0 : knots / static_cast<double>(pooled.size());
    if (chain.chains == 1 && pooled.size() >= 4) summary["ips"] = to_json(ips_variance(pooled));
    write_json(out / "summary.json", summary);
    json top = chain.chains == 1 ? per_chain[0] : json{{"chains", per_chain}};
    top["summary"] = summary;
    write_json(out / "manifest.json", manifest.finish(top));
    std::cout << std::setprecision(17) << summary.dump(2) << '\n';
  }
};

// ---------------------------------------------------------------------------
// --config: key=value lines become --key=value for every key not already
// given on the command line.

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file " + file);
  auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> injected;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error(file + ":" + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    const std::string value = trim(line.substr(eq + 1));
    if (!given(key)) injected.push_back("--" + key + "=" + value);
  }
  // Insert right after the subcommand name.
  const auto at = args.empty() ? args.end() : args.begin() + 1;
  args.insert(at, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform sampling and integration on spaces of closed polygons and arms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(POLYSAMPLE_VERSION));
  app.add_option("--config", "file of key=value lines used as defaults for unset flags");

  SampleCommand sample;
  IntegrateCommand integrate;
  ReferenceCommand reference;
  PolytopeCommand polytope;
  KnotscanCommand knotscan;
  auto* sample_app = app.add_subcommand("sample", "run a chain and write its polygons and coordinates");
  auto* integrate_app = app.add_subcommand("integrate", "estimate expectations with IPS confidence intervals");
  auto* reference_app = app.add_subcommand("reference", "print exact reference tables as CSV");
  auto* polytope_app = app.add_subcommand("polytope", "volume and centroid of a moment polytope by Monte Carlo");
  auto* knotscan_app = app.add_subcommand("knotscan", "knot determinants along a hexagon chain");
  sample.add_to(*sample_app);
  integrate.add_to(*integrate_app);
  reference.add_to(*reference_app);
  polytope.add_to(*polytope_app);
  knotscan.add_to(*knotscan_app);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // CLI11 takes arguments in reverse order.
    std::vector<std::string> expanded = expand_config(args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "polysample: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sample_app) sample.run(*sample_app);
    if (*integrate_app) integrate.run(*integrate_app);
    if (*reference_app) reference.run(*reference_app);
    if (*polytope_app) polytope.run(*polytope_app);
    if (*knotscan_app) knotscan.run(*knotscan_app);
  } catch (const std::exception& e) {
    std::cerr << "polysample: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
