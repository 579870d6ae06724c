#include "polyvf/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "polyvf/realize.hpp"
#include "polyvf/stability.hpp"

namespace polyvf {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_input(const std::string& arg) {
  std::error_code ec;
  if (arg.find('\n') == std::string::npos && std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

// Polynomial files may carry comment lines; the first other line is used.
Polynomial read_polynomial(const std::string& arg) {
  std::istringstream in(read_input(arg));
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return parse_polynomial(line);
  }
  throw Error(ErrorKind::InvalidInput, "no polynomial in input");
}

struct Out {
  std::string text;
  void kv(const std::string& k, const std::string& v) { text += k + ": " + v + "\n"; }
};

struct TraceFlags {
  TraceOptions opts;
  double landing_radius = 0.0;
  void add(CLI::App* app) {
    app->add_option("--escape-factor", opts.escape_factor, "escape radius / root scale");
    app->add_option("--landing-radius", landing_radius, "landing radius / root scale (default 1e-8)");
    app->add_option("--step-budget", opts.step_budget, "integration step budget per separatrix");
    app->add_option("--angle-tol", opts.angle_tol, "angular tolerance for return angles (0: pi/(4(d-1)))");
  }
  TraceOptions get() const {
    TraceOptions o = opts;
    if (landing_radius > 0) o.landing_factor = landing_radius;
    return o;
  }
  void echo(Out& out) const {
    const auto o = get();
    out.kv("option.escape_factor", num(o.escape_factor));
    out.kv("option.landing_radius", num(o.landing_factor));
    out.kv("option.step_budget", std::to_string(o.step_budget));
    out.kv("option.angle_tol", num(o.angle_tol));
  }
};

void write_graph(Out& out, const SeparatrixGraphNumeric& g) {
  for (const auto& t : g.traces) {
    std::string v(to_string(t.outcome));
    if (t.outcome == TraceOutcome::Landing) v += " root=" + std::to_string(t.root);
    if (t.outcome == TraceOutcome::Homoclinic)
      v += " partner=" + std::to_string(t.partner) + " tau=" + format_complex(t.tau);
    if (!t.diagnostic.empty() && t.outcome == TraceOutcome::Uncertain) v += " (" + t.diagnostic + ")";
    out.kv("separatrix." + std::to_string(t.index), v);
  }
  for (std::size_t i = 0; i < g.equilibria.size(); ++i) {
    const auto& e = g.equilibria[i];
    out.kv("equilibrium." + std::to_string(i), format_complex(e.position) + " multiplicity=" +
                                                   std::to_string(e.multiplicity) + " kind=" +
                                                   std::string(to_string(e.kind)) + " residue=" +
                                                   format_complex(e.residue));
  }
}

void write_metric(Out& out, const MetricGraph& m) {
  std::istringstream in(format_metric_graph(m));
  for (std::string line; std::getline(in, line);) out.text += line + "\n";
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::UncertainClassification:
    case ErrorKind::InconsistentGraph:
    case ErrorKind::CrossingPathHitsSingularity:
      return 2;
    case ErrorKind::NoConvergence:
    case ErrorKind::ClassUnreachable:
      return 3;
    default:
      return 4;
  }
}

}  // namespace

CommandResult execute_command(const std::vector<std::string>& argv) {
  CommandResult res;
  Out out;

  CLI::App app{"Classification of polynomial vector fields", "polyvf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("polyvf ") + kVersion);
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--seed", seed, "seed for all randomness")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0: POLYVF_THREADS or hardware)");

  std::string input;
  TraceFlags trace;

  auto* classify_cmd = app.add_subcommand("classify", "separatrix graph, class and invariants of a polynomial");
  std::string metric_out;
  classify_cmd->add_option("input", input, "'coeffs: a0,...,1', 'roots: z1^m,...' or a file")->required();
  classify_cmd->add_option("--metric-out", metric_out, "write the metric graph to this file");
  trace.add(classify_cmd);

  auto* invariants_cmd = app.add_subcommand("invariants", "metric graph of a polynomial");
  invariants_cmd->add_option("input", input, "polynomial text or file")->required();
  trace.add(invariants_cmd);

  auto* realize_cmd = app.add_subcommand("realize", "polynomial with a given metric graph");
  RealizeOptions ropts;
  std::string seed_poly;
  realize_cmd->add_option("input", input, "metric-graph file or text")->required();
  realize_cmd->add_option("--max-seeds", ropts.max_seeds, "random starts")->capture_default_str();
  realize_cmd->add_option("--tol", ropts.tol, "relative invariant tolerance")->capture_default_str();
  realize_cmd->add_option("--seed-poly", seed_poly, "starting polynomial");

  auto* enumerate_cmd = app.add_subcommand("enumerate", "all candidate classes of a degree");
  int degree = 2, cap = 5;
  bool confirm = false;
  enumerate_cmd->add_option("degree", degree, "degree d")->required();
  enumerate_cmd->add_option("--cap", cap, "largest degree allowed")->capture_default_str();
  enumerate_cmd->add_flag("--confirm", confirm, "realize a random target per class to confirm it");

  auto* bif_cmd = app.add_subcommand("bifurcations", "H-chains, homoclinic breaking and formation for a class");
  std::vector<std::string> form;
  bif_cmd->add_option("class", input, "bracketing, e.g. '(0 1)(2 3)'")->required();
  bif_cmd->add_option("--form", form, "query 'k,j' for forming s_{k,j} (repeatable)");

  auto* stab_cmd = app.add_subcommand("stability", "protective sector and landing stability of a separatrix");
  int sep = 0, trials = 100;
  double delta = 0.01, margin = 1e-3;
  bool verbose = false;
  stab_cmd->add_option("input", input, "polynomial text or file")->required();
  stab_cmd->add_option("--sep", sep, "separatrix index")->capture_default_str();
  stab_cmd->add_option("--delta", delta, "perturbation radius")->capture_default_str();
  stab_cmd->add_option("--trials", trials, "number of perturbations")->capture_default_str();
  stab_cmd->add_option("--margin", margin, "sector margin")->capture_default_str();
  stab_cmd->add_flag("--verbose", verbose, "list every trial");
  trace.add(stab_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "class frequencies over random coefficients");
  SweepOptions sopts;
  sweep_cmd->add_option("--degree", sopts.degree, "degree")->capture_default_str();
  sweep_cmd->add_option("--samples", sopts.samples, "number of samples")->capture_default_str();
  sweep_cmd->add_option("--box", sopts.box, "coefficient box half-width")->capture_default_str();
  trace.add(sweep_cmd);

  auto* portrait_cmd = app.add_subcommand("portrait", "SVG phase portrait");
  PortraitOptions popts;
  std::string svg_out = "portrait.svg";
  portrait_cmd->add_option("input", input, "polynomial text or file")->required();
  portrait_cmd->add_option("--out", svg_out, "output file")->capture_default_str();
  portrait_cmd->add_option("--size", popts.size, "pixels")->capture_default_str();
  portrait_cmd->add_option("--streamlines", popts.streamlines, "streamline seeds per side")->capture_default_str();
  portrait_cmd->add_option("--view", popts.view_factor, "viewport radius / root scale")->capture_default_str();
  trace.add(portrait_cmd);

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, err;
    const int code = app.exit(e, o, err);
    res.exit_code = code == 0 ? 0 : 4;
    res.payload = o.str() + err.str();
    if (code != 0) res.payload += app.help();
    return res;
  }

  const auto* cmd = app.get_subcommands().front();
  out.kv("tool", std::string("polyvf ") + kVersion);
  out.kv("command", cmd->get_name());
  out.kv("option.seed", std::to_string(seed));
  out.kv("option.threads", std::to_string(threads));
  if (!input.empty()) out.kv("option.input", input.find('\n') == std::string::npos ? input : "(inline)");

  try {
    if (cmd == classify_cmd || cmd == invariants_cmd) {
      trace.echo(out);
      const auto p = read_polynomial(input);
      out.kv("polynomial", format_coefficients(p));
      out.kv("polynomial_roots", format_roots(p));
      const auto g = trace_all(p, trace.get(), threads);
      if (cmd == classify_cmd) write_graph(out, g);
      if (g.uncertain) {
        out.kv("status", "uncertain");
        for (const auto& d : g.diagnostics) out.kv("diagnostic", d);
        res.exit_code = 2;
      } else {
        const auto c = analyze_graph(p, g);
        out.kv("status", "classified");
        if (cmd == classify_cmd) {
          const auto dims = class_dimensions(c.cls);
          out.kv("dimension", std::to_string(dims.dim));
          out.kv("codimension", std::to_string(dims.codim));
          out.kv("s", std::to_string(dims.s));
          out.kv("h", std::to_string(dims.h));
          out.kv("mstar", std::to_string(dims.mstar));
        }
        write_metric(out, c.metric);
        if (!metric_out.empty()) {
          std::ofstream(metric_out) << format_metric_graph(c.metric);
          res.artifacts.push_back(metric_out);
        }
      }
    } else if (cmd == realize_cmd) {
      ropts.seed = seed;
      out.kv("option.max_seeds", std::to_string(ropts.max_seeds));
      out.kv("option.tol", num(ropts.tol));
      if (!seed_poly.empty()) out.kv("option.seed_poly", seed_poly);
      const auto target = parse_metric_graph(read_input(input));
      std::optional<Polynomial> start;
      if (!seed_poly.empty()) start = read_polynomial(seed_poly);
      const auto r = realize(target, start, ropts);
      out.kv("status", std::string(to_string(r.status)));
      out.kv("residual", num(r.residual));
      out.kv("iterations", std::to_string(r.iterations));
      out.kv("starts", std::to_string(r.starts));
      out.kv("note", r.note);
      out.kv("polynomial", format_coefficients(r.polynomial));
      out.kv("polynomial_roots", format_roots(r.polynomial));
      if (std::isfinite(r.residual)) write_metric(out, r.achieved);
      if (r.status != RealizeStatus::Converged) res.exit_code = 3;
    } else if (cmd == enumerate_cmd) {
      out.kv("option.cap", std::to_string(cap));
      out.kv("option.confirm", confirm ? "true" : "false");
      std::mt19937_64 rng(seed);
      WitnessFn witness;
      if (confirm)
        witness = [&](const Bracketing& b) {
          std::uniform_real_distribution<double> mag(0.5, 2.0), arg(0.3, 2.8);
          MetricGraph m{b, {}, {}};
          for (int i = 0; i < b.h(); ++i) m.taus.push_back(mag(rng));
          for (int i = 0; i < b.s(); ++i) m.alphas.push_back(std::polar(mag(rng), arg(rng)));
          RealizeOptions o;
          o.seed = seed;
          const auto r = realize(m, std::nullopt, o);
          return r.status == RealizeStatus::Converged;
        };
      const auto classes = enumerate_classes(degree, cap, witness);
      out.kv("count", std::to_string(classes.size()));
      for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& e = classes[i];
        out.kv("class." + std::to_string(i), format_bracketing(e.cls) + " dim=" + std::to_string(e.dims.dim) +
                                                 " codim=" + std::to_string(e.dims.codim) +
                                                 " s=" + std::to_string(e.dims.s) + " h=" + std::to_string(e.dims.h) +
                                                 " mstar=" + std::to_string(e.dims.mstar) + " flag=" +
                                                 std::string(to_string(e.flag)));
      }
    } else if (cmd == bif_cmd) {
      const auto b = parse_bracketing(input);
      const auto rep = validate_class(b);
      if (!rep.valid) throw Error(ErrorKind::InvalidInput, "invalid class: " + rep.errors.front());
      out.kv("class", format_bracketing(b));
      const auto chains = h_chains(b);
      for (std::size_t i = 0; i < chains.size(); ++i) {
        std::string v;
        for (const auto& [k, j] : chains[i].sequence) v += "(" + std::to_string(k) + "," + std::to_string(j) + ")";
        v += " itinerary=" + (chains[i].itinerary.empty() ? std::string("-") : chains[i].itinerary);
        v += chains[i].closed ? " closed" : " open";
        out.kv("chain." + std::to_string(i), v);
      }
      for (const auto& pr : b.round)
        for (int side : {+1, -1})
          out.kv("break." + std::to_string(pr.first) + "," + std::to_string(pr.second) + (side > 0 ? ".upper" : ".lower"),
                 format_bracketing(break_homoclinic(b, pr, side)));
      for (const auto& q : form) {
        const auto comma = q.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::InvalidInput, "--form expects 'k,j'");
        const int k = std::stoi(q.substr(0, comma)), j = std::stoi(q.substr(comma + 1));
        const auto f = can_form_homoclinic(b, k, j);
        std::string v = f.possible ? "possible" : "impossible";
        if (f.possible) {
          v += " conditions=[";
          for (std::size_t m = 0; m < f.sign_conditions.size(); ++m)
            v += (m ? "," : "") + std::string(f.sign_conditions[m] > 0 ? "T" + std::to_string(m + 1) + ">0"
                                                                        : "T" + std::to_string(m + 1) + "<0");
          v += "] total=0";
        }
        out.kv("form." + q, v);
      }
    } else if (cmd == stab_cmd) {
      trace.echo(out);
      out.kv("option.sep", std::to_string(sep));
      out.kv("option.delta", num(delta));
      out.kv("option.trials", std::to_string(trials));
      out.kv("option.margin", num(margin));
      const auto p = read_polynomial(input);
      const auto g = trace_all(p, trace.get(), threads);
      if (sep < 0 || sep >= static_cast<int>(g.traces.size()))
        throw Error(ErrorKind::InvalidInput, "separatrix index out of range");
      if (g.traces[sep].outcome != TraceOutcome::Landing)
        throw Error(ErrorKind::NotLanding, "s" + std::to_string(sep) + " is " +
                                               std::string(to_string(g.traces[sep].outcome)));
      if (g.uncertain) {
        out.kv("sector", "unavailable (uncertain graph)");
      } else {
        const auto s = protective_sector(analyze_graph(p, g), sep, margin);
        out.kv("sector.case", std::string(to_string(s.kind)));
        out.kv("sector.angle", num(s.angle));
        std::string sums;
        for (cplx a : s.partial_sums) sums += (sums.empty() ? "" : ", ") + format_complex(a);
        out.kv("sector.partial_sums", "[" + sums + "]");
      }
      const auto rep = check_landing_stability(p, sep, delta, trials, seed, trace.get(), threads);
      out.kv("continued", std::to_string(rep.continued));
      out.kv("elsewhere", std::to_string(rep.elsewhere));
      out.kv("homoclinic", std::to_string(rep.homoclinic));
      out.kv("uncertain", std::to_string(rep.uncertain));
      out.kv("max_s_bound", num(rep.max_s_bound));
      out.kv("threshold", num(rep.threshold));
      if (verbose)
        for (std::size_t t = 0; t < rep.outcomes.size(); ++t)
          out.kv("trial." + std::to_string(t), std::string(to_string(rep.outcomes[t])));
    } else if (cmd == sweep_cmd) {
      trace.echo(out);
      sopts.seed = seed;
      sopts.threads = threads;
      sopts.trace = trace.get();
      out.kv("option.degree", std::to_string(sopts.degree));
      out.kv("option.samples", std::to_string(sopts.samples));
      out.kv("option.box", num(sopts.box));
      const auto rep = sweep_classes(sopts);
      out.kv("samples", std::to_string(rep.samples));
      out.kv("uncertain", std::to_string(rep.uncertain));
      out.kv("full_dimension", std::to_string(rep.full_dimension));
      out.kv("full_fraction", num(rep.full_fraction()));
      for (const auto& [c, n] : rep.counts) out.kv("count." + c, std::to_string(n) + " dim=" + std::to_string(rep.dims.at(c)));
    } else if (cmd == portrait_cmd) {
      trace.echo(out);
      popts.trace = trace.get();
      out.kv("option.out", svg_out);
      out.kv("option.size", std::to_string(popts.size));
      out.kv("option.streamlines", std::to_string(popts.streamlines));
      out.kv("option.view", num(popts.view_factor));
      const auto p = read_polynomial(input);
      const std::string svg = render_portrait(p, popts);
      std::ofstream f(svg_out, std::ios::binary);
      if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + svg_out);
      f << svg;
      res.artifacts.push_back(svg_out);
      out.kv("artifact", svg_out);
      out.kv("bytes", std::to_string(svg.size()));
    }
  } catch (const UncertainClassificationError& e) {
    out.kv("status", "uncertain");
    for (const auto& d : e.graph().diagnostics) out.kv("diagnostic", d);
    res.exit_code = 2;
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e);
    out.kv("status", res.exit_code == 2 ? "uncertain" : "error");
    out.kv("error", e.what());
  } catch (const std::exception& e) {
    res.exit_code = 4;
    out.kv("status", "error");
    out.kv("error", e.what());
  }
  res.payload = out.text;
  return res;
}

}  // namespace polyvf
