#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "p2plab/btsim.hpp"
#include "p2plab/cli.hpp"
#include "p2plab/engine.hpp"
#include "p2plab/lyapunov.hpp"
#include "p2plab/metrics.hpp"
#include "p2plab/rational.hpp"
#include "p2plab/scenario.hpp"

namespace py = pybind11;

namespace {

using namespace p2plab;

Rational rat(const py::handle& h) {
  if (py::isinstance<py::int_>(h)) return Rational(h.cast<long long>());
  if (py::isinstance<py::str>(h)) return parse_rational(h.cast<std::string>());
  throw py::type_error("expected an int or an exact rational string like '3/2'");
}

py::dict rational_out(const Rational& r) {
  py::dict d;
  d["exact"] = to_string(r);
  d["value"] = to_double(r);
  return d;
}

TypeCountState state_from(const py::sequence& seq) {
  if (seq.size() != 3) throw py::value_error("state must be (n0, n1, n2)");
  TypeCountState n;
  n.n0 = seq[0].cast<long long>();
  n.n1 = seq[1].cast<long long>();
  n.n2 = seq[2].cast<long long>();
  return n;
}

LyapunovConstants consts_from(const py::dict& d) {
  LyapunovConstants c;
  c.c1 = rat(d["c1"]);
  c.c2 = rat(d["c2"]);
  c.c3 = rat(d["c3"]);
  c.c4 = rat(d["c4"]);
  c.p = rat(d["p"]);
  return c;
}

py::dict consts_out(const LyapunovConstants& c) {
  py::dict d;
  d["c1"] = to_string(c.c1);
  d["c2"] = to_string(c.c2);
  d["c3"] = to_string(c.c3);
  d["c4"] = to_string(c.c4);
  d["p"] = to_string(c.p);
  return d;
}

Rates rates_from(const py::handle& lam, const py::handle& us, const py::handle& mu) {
  Rates r;
  r.lambda = rat(lam);
  r.us = rat(us);
  r.mu = rat(mu);
  return r;
}

py::dict simulate(const std::string& protocol, long long k, double lambda, double us,
                  double mu, const std::string& init, double horizon, std::uint64_t seed,
                  long long reps, double sample_dt, long long m, long long population_cap) {
  ScenarioConfig cfg;
  cfg.protocol = protocol_from_string(protocol);
  cfg.k = k;
  cfg.lambda = lambda;
  cfg.us = us;
  cfg.mu = mu;
  cfg.init = InitSpec::parse(init);
  cfg.horizon = horizon;
  cfg.rng_seed = seed;
  cfg.replications = reps;
  cfg.sample_dt = sample_dt;
  cfg.m = m;
  cfg.population_cap = population_cap;
  cfg.validate();

  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(reps));
  for (long long r = 0; r < reps; ++r)
    runs.push_back(run_scenario(cfg, static_cast<std::uint64_t>(r)));
  const auto averaged = average_replications(runs);

  py::list t, population, largest_club, sojourns;
  for (const auto& s : averaged) {
    t.append(s.t);
    population.append(s.population);
    largest_club.append(s.largest_club);
  }
  bool explosion = false;
  for (const auto& run : runs) {
    explosion = explosion || run.explosion;
    for (const auto& rec : run.sojourns)
      sojourns.append(py::make_tuple(rec.id, rec.t_arrive, rec.t_depart));
  }
  py::dict out;
  out["t"] = t;
  out["population"] = population;
  out["largest_club"] = largest_club;
  out["sojourns"] = sojourns;
  out["explosion"] = explosion;
  return out;
}

py::dict bt_simulate(long long k, long long arrivals_per_round, const std::string& init,
                     long long rounds, bool gs, std::uint64_t seed, long long reps,
                     long long population_cap) {
  BtConfig cfg;
  cfg.k = k;
  cfg.arrivals_per_round = arrivals_per_round;
  cfg.init = InitSpec::parse(init);
  cfg.horizon_rounds = rounds;
  cfg.gs_enabled = gs;
  cfg.rng_seed = seed;
  cfg.replications = reps;
  cfg.population_cap = population_cap;
  cfg.validate();

  py::list t, population, largest_club, departures;
  bool explosion = false;
  std::vector<BtRunResult> runs;
  runs.reserve(static_cast<std::size_t>(reps));
  for (long long r = 0; r < reps; ++r)
    runs.push_back(run_bt(cfg, static_cast<std::uint64_t>(r)));
  const std::size_t rows = runs.front().samples.size();
  for (std::size_t i = 0; i < rows; ++i) {
    double pop = 0, club = 0, dep = 0;
    for (const auto& run : runs) {
      pop += static_cast<double>(run.samples[i].population);
      club += static_cast<double>(run.samples[i].largest_club);
      dep += static_cast<double>(run.samples[i].departures_cum);
    }
    t.append(runs.front().samples[i].t_seconds);
    population.append(pop / static_cast<double>(runs.size()));
    largest_club.append(club / static_cast<double>(runs.size()));
    departures.append(dep / static_cast<double>(runs.size()));
  }
  for (const auto& run : runs) explosion = explosion || run.explosion;

  py::dict out;
  out["t"] = t;
  out["population"] = population;
  out["largest_club"] = largest_club;
  out["departures_cum"] = departures;
  out["explosion"] = explosion;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "simulation lab for piece-level p2p sharing protocols";

  mod.def("simulate", &simulate, py::arg("protocol") = "unstructured", py::arg("k") = 2,
          py::arg("lambda_") = 4.0, py::arg("us") = 2.0, py::arg("mu") = 1.0,
          py::arg("init") = "one_club:500", py::arg("horizon") = 1000.0,
          py::arg("seed") = 1, py::arg("reps") = 1, py::arg("sample_dt") = 1.0,
          py::arg("m") = 3, py::arg("population_cap") = 1'000'000,
          "Run the event-driven simulation and return replication-averaged series.");

  mod.def("bt_simulate", &bt_simulate, py::arg("k") = 12, py::arg("arrivals_per_round") = 30,
          py::arg("init") = "bt_mixed:494,5", py::arg("rounds") = 300, py::arg("gs") = false,
          py::arg("seed") = 1, py::arg("reps") = 1, py::arg("population_cap") = 1'000'000,
          "Run the round-based simulation and return replication-averaged series.");

  mod.def(
      "potential",
      [](const py::sequence& state, const py::dict& consts) {
        const PotentialTerms terms = potential(state_from(state), consts_from(consts));
        py::dict d;
        d["a"] = rational_out(terms.a);
        d["b"] = rational_out(terms.b);
        d["d"] = rational_out(terms.d);
        d["V"] = rational_out(terms.V);
        return d;
      },
      py::arg("state"), py::arg("constants"),
      "Exact potential terms a, b, d and V at a (n0, n1, n2) state.");

  mod.def(
      "drift",
      [](const py::sequence& state, const py::dict& consts, const py::handle& lam,
         const py::handle& us, const py::handle& mu) {
        return rational_out(
            drift(state_from(state), consts_from(consts), rates_from(lam, us, mu)));
      },
      py::arg("state"), py::arg("constants"), py::arg("lambda_"), py::arg("us"),
      py::arg("mu") = 1, "Exact one-step drift of the potential at a state.");

  mod.def(
      "closed_form_drift",
      [](const py::sequence& state, const py::dict& consts, const py::handle& lam,
         const py::handle& us, const py::handle& mu) -> py::object {
        const auto dv = closed_form_drift(state_from(state), consts_from(consts),
                                          rates_from(lam, us, mu));
        if (!dv) return py::none();
        return rational_out(*dv);
      },
      py::arg("state"), py::arg("constants"), py::arg("lambda_"), py::arg("us"),
      py::arg("mu") = 1,
      "Region formula for the drift, or None outside the covered regions.");

  mod.def(
      "closed_form_case",
      [](const py::sequence& state, const py::dict& consts) -> py::object {
        const auto label = closed_form_case(state_from(state), consts_from(consts));
        if (!label) return py::none();
        return py::str(*label);
      },
      py::arg("state"), py::arg("constants"),
      "Label of the equality region covering the state, or None.");

  mod.def(
      "find_constants",
      [](const py::handle& lam, const py::handle& us, const py::handle& c1,
         const py::handle& c3, const py::handle& c4) {
        ConstantPreset preset;
        preset.c1 = rat(c1);
        preset.c3 = rat(c3);
        preset.c4 = rat(c4);
        return consts_out(find_constants(rat(lam), rat(us), preset));
      },
      py::arg("lambda_"), py::arg("us"), py::arg("c1") = 32, py::arg("c3") = 20,
      py::arg("c4") = 10, "Smallest integer c2 and p for the given preset, exact.");

  mod.def(
      "check_conditions",
      [](const py::dict& consts, const py::handle& lam, const py::handle& us) {
        const auto ok = check_conditions(consts_from(consts), rat(lam), rat(us));
        return std::vector<bool>(ok.begin(), ok.end());
      },
      py::arg("constants"), py::arg("lambda_"), py::arg("us"),
      "The ten constant conditions, in canonical order.");

  mod.def(
      "gs_generator_k2",
      [](const py::sequence& state, const py::handle& lam, const py::handle& us,
         const py::handle& mu) {
        py::list out;
        for (const auto& [rate, next] :
             gs_generator_k2(state_from(state), rates_from(lam, us, mu)))
          out.append(py::make_tuple(rational_out(rate),
                                    py::make_tuple(next.n0, next.n1, next.n2)));
        return out;
      },
      py::arg("state"), py::arg("lambda_"), py::arg("us"), py::arg("mu") = 1,
      "Exact transition list [(rate, (n0, n1, n2)), ...] of the k=2 chain.");

  mod.def(
      "drift_scan",
      [](const py::dict& consts, const py::handle& lam, const py::handle& us,
         const py::handle& mu, const std::vector<long long>& shells,
         const std::string& mode) {
        ScanMode m;
        if (mode == "full")
          m = ScanMode::full;
        else if (mode == "grid")
          m = ScanMode::grid;
        else
          throw py::value_error("mode must be 'full' or 'grid'");
        const DriftScanResult res =
            drift_scan(consts_from(consts), rates_from(lam, us, mu), shells, m);
        py::list rows;
        for (const auto& shell : res.shells)
          rows.append(py::make_tuple(
              shell.s, rational_out(shell.max_dv),
              py::make_tuple(shell.argmax.n0, shell.argmax.n1, shell.argmax.n2)));
        py::dict d;
        d["shells"] = rows;
        d["s0"] = res.s0 ? py::cast(*res.s0) : py::object(py::none());
        d["epsilon"] = res.epsilon ? py::object(rational_out(*res.epsilon))
                                   : py::object(py::none());
        d["b_bound"] = res.b_bound ? py::object(rational_out(*res.b_bound))
                                   : py::object(py::none());
        return d;
      },
      py::arg("constants"), py::arg("lambda_"), py::arg("us"), py::arg("mu"),
      py::arg("shells"), py::arg("mode") = "full",
      "Per-shell exact drift maxima with the stability threshold s0.");

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI command in-process; returns (code, stdout, stderr).");
}
