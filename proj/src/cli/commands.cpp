#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "arsm/boa.hpp"
#include "arsm/ed.hpp"
#include "arsm/errors.hpp"
#include "arsm/poles.hpp"
#include "arsm/spectrum.hpp"
#include "arsm/u1.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/parallel.hpp"
#include "cli/svg_plot.hpp"

namespace arsm::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Globals {
  std::string config;
  std::string out_dir;
  std::string format = "csv";
  int jobs = 1;
  double tol = 1e-15;
};

struct ModelOpts {
  double delta = 0.7;
  double g1 = 0.8;
  std::optional<double> g2;
  double r = 0.5;
  double u = 0.2;
  const CLI::Option* r_opt = nullptr;
};

void add_model_options(CLI::App* sub, ModelOpts& m, bool with_g1) {
  sub->add_option("--delta", m.delta, "qubit splitting Delta");
  if (with_g1) {
    sub->add_option("--g1", m.g1, "rotating-wave coupling g1");
    sub->add_option("--g2", m.g2, "counter-rotating coupling g2 (excludes --r)");
  }
  m.r_opt = sub->add_option("--r", m.r, "anisotropy ratio g2/g1");
  sub->add_option("--u", m.u, "Stark coupling U");
}

ModelParams resolve_model(const ModelOpts& m) {
  if (m.g2 && m.r_opt && m.r_opt->count() > 0) {
    throw ConfigError("give either --g2 or --r, not both");
  }
  const double g2 = m.g2 ? *m.g2 : m.r * m.g1;
  return ModelParams::make(m.delta, m.g1, g2, m.u);
}

CouplingFamily resolve_family(const ModelOpts& m) {
  CouplingFamily fam{m.delta, m.u, m.r};
  if (!std::isfinite(fam.ratio) || fam.ratio < 0.0) {
    throw ConfigError("--r must be a non-negative number");
  }
  return fam;
}

void require_range(double lo, double hi, const std::string& what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError(what + " range is empty or not finite");
  }
}

void require_at_least(long v, long min, const std::string& what) {
  if (v < min) {
    throw ConfigError(what + " must be at least " + std::to_string(min));
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  if (n > 1) v.back() = hi;
  return v;
}

std::string option_value(const CLI::Option* o) {
  if (o->count() > 0) {
    std::string s;
    for (const auto& r : o->results()) s += (s.empty() ? "" : ";") + r;
    return s.empty() ? "true" : s;
  }
  const std::string d = o->get_default_str();
  if (!d.empty()) return d;
  return o->get_expected_min() == 0 ? "false" : "unset";
}

ParamList collect_params(const CLI::App* sub, const Globals& g) {
  ParamList out;
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "h") continue;
    out.emplace_back(name, option_value(o));
  }
  out.emplace_back("format", g.format);
  out.emplace_back("jobs", std::to_string(g.jobs));
  out.emplace_back("tol", format_number(g.tol));
  return out;
}

// Sends tables either to the output stream or into --out.
class Emitter {
 public:
  Emitter(const Globals& g, Provenance prov, std::ostream& out)
      : g_(g), prov_(std::move(prov)), out_(out) {}

  void table(const Table& t) {
    const Format fmt = g_.format == "json" ? Format::Json : Format::Csv;
    if (g_.out_dir.empty()) {
      if (count_++ > 0) out_ << "\n";
      write_table(out_, t, prov_, fmt);
    } else {
      out_ << "wrote " << write_table_file(g_.out_dir, t, prov_, fmt) << "\n";
    }
  }

  void plot(const std::string& name, const Plot& p) {
    const std::string dir = g_.out_dir.empty() ? "." : g_.out_dir;
    const auto path = (std::filesystem::path(dir) / (name + ".svg")).string();
    write_text_file(path, render_svg(p));
    if (!g_.out_dir.empty()) out_ << "wrote " << path << "\n";
  }

 private:
  const Globals& g_;
  Provenance prov_;
  std::ostream& out_;
  int count_ = 0;
};

const char* kPalette[] = {"#1f4e9c", "#c0392b", "#27ae60", "#8e44ad",
                          "#d35400", "#16a085", "#2c3e50", "#7f8c8d"};

// --- gcurve -----------------------------------------------------------

struct GcurveOpts {
  ModelOpts m;
  double e_min = -1.0;
  double e_max = 3.0;
  int points = 2001;
  bool plot = false;
};

void cmd_gcurve(const GcurveOpts& o, const Globals& g, Emitter& em) {
  require_range(o.e_min, o.e_max, "energy");
  require_at_least(o.points, 2, "--points");
  const ModelParams p = resolve_model(o.m);
  derive(p);
  boa::Options bo;
  bo.tol = g.tol;

  struct Row {
    double even = kNaN, odd = kNaN;
    bool near_pole = false;
    std::string status = "ok";
  };
  const auto es = linspace(o.e_min, o.e_max, o.points);
  const auto rows = parallel_map<Row>(es.size(), g.jobs, [&](std::size_t i) {
    Row r;
    try {
      const auto gp = boa::g_functions(p, es[i], bo);
      r.even = gp.even.value;
      r.odd = gp.odd.value;
      r.near_pole = gp.even.near_pole;
    } catch (const PoleHit&) {
      r.near_pole = true;
      r.status = "pole";
    } catch (const NotConverged&) {
      r.status = "not_converged";
    }
    return r;
  });

  Table t{"gcurve", {"E", "G_even", "G_odd", "near_pole", "status"}, {}};
  for (std::size_t i = 0; i < es.size(); ++i) {
    t.add({es[i], rows[i].even, rows[i].odd, rows[i].near_pole ? 1L : 0L,
           rows[i].status});
  }
  em.table(t);

  Table tp{"gcurve_poles", {"pole_index", "energy"}, {}};
  const double e0 = first_pole_energy(p);
  std::vector<double> pole_lines;
  if (e0 >= o.e_min && e0 <= o.e_max) {
    tp.add({0L, e0});
    pole_lines.push_back(e0);
  }
  for (int m = 1; m <= bo.max_terms; ++m) {
    const double em_ = regular_pole_energy(p, m);
    if (em_ > o.e_max) break;
    if (em_ >= o.e_min) {
      tp.add({static_cast<long>(m), em_});
      pole_lines.push_back(em_);
    }
  }
  em.table(tp);

  spectrum::FindOptions fo;
  fo.boa = bo;
  const auto spec = spectrum::find_spectrum(
      p, o.e_min, o.e_max, std::max(64, 400 * static_cast<int>(std::ceil(o.e_max - o.e_min))), fo);
  Table tr{"gcurve_roots", {"index", "energy", "parity", "residual", "flag"}, {}};
  long idx = 0;
  for (const auto& lv : spec.levels) {
    std::string flag = lv.tangency ? "tangency" : (lv.near_pole ? "near_pole" : "");
    if (lv.degenerate) flag += flag.empty() ? "degenerate" : "+degenerate";
    tr.add({idx++, lv.energy, std::string(to_string(lv.parity)), lv.residual, flag});
  }
  em.table(tr);

  if (o.plot) {
    Plot pl;
    pl.title = "G-curves";
    pl.xlabel = "E";
    pl.ylabel = "G";
    pl.ymin = -2.0;
    pl.ymax = 2.0;
    Series se{"G_even", {}, {}, "#c0392b", 2.0};
    Series so{"G_odd", {}, {}, "#1f4e9c", 1.0};
    for (std::size_t i = 0; i < es.size(); ++i) {
      se.x.push_back(es[i]);
      se.y.push_back(rows[i].even);
      so.x.push_back(es[i]);
      so.y.push_back(rows[i].odd);
    }
    Series ed_pts{"ED", {}, {}, "#000000", 1.0, true};
    const auto edr = ed::solve(p, ed::kDefaultTruncation, false);
    for (double e : edr.energies) {
      if (e < o.e_min || e > o.e_max) continue;
      ed_pts.x.push_back(e);
      ed_pts.y.push_back(0.0);
    }
    pl.series = {se, so, ed_pts};
    pl.vlines = pole_lines;
    pl.hlines = {0.0};
    em.plot("gcurve", pl);
  }
}

// --- spectrum ---------------------------------------------------------

struct SpectrumOpts {
  ModelOpts m;
  double g1_min = 0.02;
  double g1_max = 2.0;
  int g1_points = 100;
  double e_min = -2.0;
  double e_max = 2.0;
  int scan_points = 800;
  int juddian_poles = 3;
  bool plot = false;
};

void cmd_spectrum(const SpectrumOpts& o, const Globals& g, Emitter& em) {
  require_range(o.g1_min, o.g1_max, "g1");
  require_range(o.e_min, o.e_max, "energy");
  require_at_least(o.g1_points, 2, "--g1-points");
  require_at_least(o.scan_points, 64, "--scan-points");
  if (o.g1_min <= 0.0) throw ConfigError("--g1-min must be positive");
  const CouplingFamily fam = resolve_family(o.m);
  fam.at(o.g1_min);
  spectrum::FindOptions fo;
  fo.boa.tol = g.tol;

  const auto gs = linspace(o.g1_min, o.g1_max, o.g1_points);
  const auto specs = parallel_map<spectrum::SpectrumResult>(
      gs.size(), g.jobs, [&](std::size_t i) {
        return spectrum::find_spectrum(fam.at(gs[i]), o.e_min, o.e_max,
                                       o.scan_points, fo);
      });

  Table t{"spectrum", {"g1", "level_index", "energy", "parity", "residual"}, {}};
  Table gap{"spectrum_gap", {"g1", "delta_e"}, {}};
  for (std::size_t i = 0; i < gs.size(); ++i) {
    long k = 0;
    for (const auto& lv : specs[i].levels) {
      t.add({gs[i], k++, lv.energy, std::string(to_string(lv.parity)), lv.residual});
    }
    const auto& L = specs[i].levels;
    gap.add({gs[i], L.size() >= 2 ? L[1].energy - L[0].energy : kNaN});
  }
  em.table(t);

  Table tp{"spectrum_poles", {"g1", "pole_index", "energy"}, {}};
  for (double g1 : gs) {
    const ModelParams p = fam.at(g1);
    tp.add({g1, 0L, first_pole_energy(p)});
    for (int m = 1; m <= fo.boa.max_terms; ++m) {
      const double e = regular_pole_energy(p, m);
      if (e > o.e_max) break;
      tp.add({g1, static_cast<long>(m), e});
    }
  }
  em.table(tp);
  em.table(gap);

  Table tc{"spectrum_crossings", {"kind", "pole_index", "g1", "energy"}, {}};
  if (auto c = spectrum::first_order_critical(fam);
      c && c->g1_critical >= o.g1_min && c->g1_critical <= o.g1_max) {
    tc.add({std::string("first_order"), 0L, c->g1_critical, c->energy});
  }
  for (int m = 1; m <= o.juddian_poles; ++m) {
    for (const auto& c :
         spectrum::juddian_crossings(fam, m, o.g1_min, o.g1_max, 400, fo.boa)) {
      if (c.energy < o.e_min || c.energy > o.e_max) continue;
      tc.add({std::string("juddian"), static_cast<long>(m), c.g1_critical, c.energy});
    }
  }
  em.table(tc);

  if (o.plot) {
    Plot pl;
    pl.title = "spectrum";
    pl.xlabel = "g1";
    pl.ylabel = "E";
    pl.ymin = o.e_min;
    pl.ymax = o.e_max;
    std::map<std::pair<int, std::size_t>, Series> lines;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      std::size_t ne = 0, no = 0;
      for (const auto& lv : specs[i].levels) {
        const bool even = lv.parity == Parity::Even;
        auto& s = lines[{even ? 0 : 1, even ? ne++ : no++}];
        s.color = even ? "#c0392b" : "#1f4e9c";
        s.x.push_back(gs[i]);
        s.y.push_back(lv.energy);
      }
    }
    for (auto& [k, s] : lines) pl.series.push_back(std::move(s));
    Series first_s{"", {}, {}, "#27ae60", 0.8, false, true};
    for (double g1 : gs) {
      first_s.x.push_back(g1);
      first_s.y.push_back(first_pole_energy(fam.at(g1)));
    }
    pl.series.push_back(first_s);
    std::map<long, Series> ladder;
    for (const auto& row : tp.rows) {
      const long m = std::get<long>(row[1]);
      if (m == 0) continue;
      auto& s = ladder[m];
      s.color = "#000000";
      s.width = 0.6;
      s.dashed = true;
      s.x.push_back(std::get<double>(row[0]));
      s.y.push_back(std::get<double>(row[2]));
    }
    for (auto& [m, s] : ladder) pl.series.push_back(std::move(s));
    Series marks{"crossings", {}, {}, "#000000", 1.0, true};
    for (const auto& row : tc.rows) {
      marks.x.push_back(std::get<double>(row[2]));
      marks.y.push_back(std::get<double>(row[3]));
    }
    pl.series.push_back(marks);
    em.plot("spectrum", pl);
  }
}

// --- poles ------------------------------------------------------------

struct PolesOpts {
  ModelOpts m;
  int m_max = 10;
};

void cmd_poles(const PolesOpts& o, const Globals&, Emitter& em) {
  require_at_least(o.m_max, 0, "--m-max");
  const ModelParams p = resolve_model(o.m);
  const auto lad = spectrum::poles(p, o.m_max);
  Table t{"poles", {"pole_index", "energy", "kind"}, {}};
  t.add({0L, lad.first_pole, std::string("first")});
  for (std::size_t i = 0; i < lad.regular_poles.size(); ++i) {
    t.add({static_cast<long>(i + 1), lad.regular_poles[i], std::string("regular")});
  }
  em.table(t);
}

// --- critical / crossing ----------------------------------------------

struct CriticalOpts {
  ModelOpts m;
  double g1_min = 0.05;
  double g1_max = 3.0;
  int n_trunc = 300;
  int ed_points = 41;
  bool no_ed = false;
};

void cmd_critical(const CriticalOpts& o, const Globals&, Emitter& em) {
  require_range(o.g1_min, o.g1_max, "g1");
  require_at_least(o.n_trunc, 1, "--n-trunc");
  require_at_least(o.ed_points, 2, "--ed-points");
  const CouplingFamily fam = resolve_family(o.m);
  const auto formula = spectrum::first_order_critical(fam);
  Table t{"critical", {"method", "found", "g1c", "energy", "gap"}, {}};
  const double rad = spectrum::critical_radicand(fam);
  t.add({std::string("formula"), formula ? 1L : 0L,
         formula ? formula->g1_critical : kNaN, formula ? formula->energy : kNaN,
         kNaN});
  std::optional<spectrum::CrossingPoint> edc;
  if (!o.no_ed) {
    spectrum::EdCrossingOptions eo;
    eo.n_truncation = o.n_trunc;
    eo.scan_points = o.ed_points;
    edc = spectrum::crossing_via_ed(fam, o.g1_min, o.g1_max, eo);
    t.add({std::string("ed"), edc ? 1L : 0L, edc ? edc->g1_critical : kNaN,
           edc ? edc->energy : kNaN, edc ? edc->gap : kNaN});
  }
  const double diff = formula && edc ? std::abs(formula->g1_critical - edc->g1_critical)
                                     : kNaN;
  t.add({std::string("difference"), formula && edc ? 1L : 0L, diff, kNaN, kNaN});
  const double u = fam.stark_u;
  const double r_limit = std::sqrt((1.0 + u) / (1.0 - u));
  t.add({std::string("radicand"), rad > 0.0 ? 1L : 0L, rad, kNaN, kNaN});
  t.add({std::string("r_limit"), fam.ratio < r_limit ? 1L : 0L, r_limit, kNaN, kNaN});
  em.table(t);
}

struct CrossingOpts {
  ModelOpts m;
  int pole = 1;
  double g1_min = 0.02;
  double g1_max = 2.0;
  int points = 400;
  int n_trunc = 300;
};

void cmd_crossing(const CrossingOpts& o, const Globals& g, Emitter& em) {
  require_range(o.g1_min, o.g1_max, "g1");
  require_at_least(o.pole, 0, "--pole");
  require_at_least(o.points, 2, "--points");
  const CouplingFamily fam = resolve_family(o.m);
  Table t{"crossing", {"kind", "method", "pole_index", "g1", "energy"}, {}};
  if (o.pole == 0) {
    if (auto c = spectrum::first_order_critical(fam)) {
      t.add({std::string("first_order"), std::string("formula"), 0L, c->g1_critical,
             c->energy});
    }
    spectrum::EdCrossingOptions eo;
    eo.n_truncation = o.n_trunc;
    if (auto c = spectrum::crossing_via_ed(fam, o.g1_min, o.g1_max, eo)) {
      t.add({std::string("first_order"), std::string("ed"), 0L, c->g1_critical,
             c->energy});
    }
  } else {
    boa::Options bo;
    bo.tol = g.tol;
    for (const auto& c :
         spectrum::juddian_crossings(fam, o.pole, o.g1_min, o.g1_max, o.points, bo)) {
      t.add({std::string("juddian"), std::string("pole_consistency"),
             static_cast<long>(c.pole_index), c.g1_critical, c.energy});
    }
  }
  em.table(t);
}

// --- ed ---------------------------------------------------------------

struct EdOpts {
  ModelOpts m;
  int n_trunc = ed::kDefaultTruncation;
  int levels = 10;
  bool no_check = false;
};

void cmd_ed(const EdOpts& o, const Globals&, Emitter& em) {
  require_at_least(o.n_trunc, 1, "--n-trunc");
  require_at_least(o.levels, 1, "--levels");
  const ModelParams p = resolve_model(o.m);
  const auto r = ed::solve(p, o.n_trunc, !o.no_check);
  Table t{"ed", {"level", "energy", "parity", "converged"}, {}};
  const int n = std::min<int>(o.levels, static_cast<int>(r.energies.size()));
  for (int i = 0; i < n; ++i) {
    const std::string conv =
        r.converged_count < 0 ? "unchecked" : (i < r.converged_count ? "yes" : "no");
    t.add({static_cast<long>(i), r.energies[i], r.parities[i], conv});
  }
  em.table(t);
}

// --- u1 / gapfit ------------------------------------------------------

struct U1Opts {
  double delta = 0.5;
  double kappa = 0.5;
  double u = 1.0;
  std::optional<double> alpha;
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  int alpha_points = 60;
  int levels = 5;
  std::string branch = "lower";
  bool plot = false;
};

u1::U1Params resolve_u1(double delta, double kappa, double u, double alpha) {
  if (std::abs(std::abs(u) - 1.0) > kUnitStarkTolerance) {
    throw ConfigError("--u must be +1 or -1 for the unit-Stark path");
  }
  return u1::U1Params::make(delta, alpha, kappa,
                            u > 0 ? u1::StarkSign::Plus : u1::StarkSign::Minus);
}

int cmd_u1(const U1Opts& o, const Globals& g, Emitter& em, std::ostream& err) {
  require_at_least(o.levels, 1, "--levels");
  const u1::U1Params base = resolve_u1(o.delta, o.kappa, o.u, 0.0);
  std::optional<double> ac;
  try {
    ac = u1::critical_alpha(base);
  } catch (const NoTransition&) {
  }

  std::vector<double> alphas;
  if (o.alpha) {
    if (o.alpha_min || o.alpha_max) {
      throw ConfigError("give either --alpha or an --alpha-min/--alpha-max sweep");
    }
    alphas = {*o.alpha};
  } else {
    require_at_least(o.alpha_points, 2, "--alpha-points");
    const double lo = o.alpha_min.value_or(0.0);
    const double hi = o.alpha_max ? *o.alpha_max : (ac ? *ac - 1e-4 : 1.0);
    require_range(lo, hi, "alpha");
    alphas = linspace(lo, hi, o.alpha_points);
  }
  for (double a : alphas) resolve_u1(o.delta, o.kappa, o.u, a);

  const bool want_lower = o.branch == "lower" || o.branch == "both";
  const bool want_upper = o.branch == "upper" || o.branch == "both";

  struct Cell3 {
    double energy = kNaN;
    double offset = kNaN;
    std::string error;
  };
  struct AlphaRow {
    std::vector<Cell3> lower, upper;
  };
  const auto rows = parallel_map<AlphaRow>(alphas.size(), g.jobs, [&](std::size_t i) {
    const auto q = resolve_u1(o.delta, o.kappa, o.u, alphas[i]);
    const double ec = u1::critical_energy(q);
    AlphaRow r;
    for (int n = 0; n < o.levels; ++n) {
      if (want_lower) {
        Cell3 c;
        try {
          const double x = u1::lower_depth(q, n);
          c.energy = ec - x;
          c.offset = -x;
        } catch (const Error& e) {
          c.error = e.what();
        }
        r.lower.push_back(c);
      }
      if (want_upper) {
        Cell3 c;
        try {
          c.energy = u1::self_consistent_level(q, n, u1::Branch::Upper);
          c.offset = c.energy - ec;
        } catch (const Error& e) {
          c.error = e.what();
        }
        r.upper.push_back(c);
      }
    }
    return r;
  });

  Table t{"u1", {"alpha", "n", "energy", "branch", "e_minus_ec"}, {}};
  std::string first_error;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    auto put = [&](const std::vector<Cell3>& cells, const char* name) {
      for (std::size_t n = 0; n < cells.size(); ++n) {
        if (!cells[n].error.empty()) {
          if (first_error.empty()) first_error = std::string(name) + ": " + cells[n].error;
          continue;
        }
        t.add({alphas[i], static_cast<long>(n), cells[n].energy, std::string(name),
               cells[n].offset});
      }
    };
    put(rows[i].lower, "lower");
    put(rows[i].upper, "upper");
  }
  if (t.rows.empty()) {
    err << "error: " << (first_error.empty() ? "no levels" : first_error) << "\n";
    return kNumericalFailure;
  }
  if (!first_error.empty()) err << "note: " << first_error << "\n";
  em.table(t);

  if (o.plot) {
    Plot pl;
    pl.title = "unit-Stark levels relative to E_c";
    pl.xlabel = "alpha";
    pl.ylabel = "E - E_c";
    std::map<std::pair<std::string, long>, Series> lines;
    for (const auto& row : t.rows) {
      const auto key = std::make_pair(std::get<std::string>(row[3]), std::get<long>(row[1]));
      auto& s = lines[key];
      s.color = kPalette[key.second % 8];
      s.dashed = key.first == "upper";
      s.x.push_back(std::get<double>(row[0]));
      s.y.push_back(std::get<double>(row[4]));
    }
    for (auto& [k, s] : lines) {
      s.label = k.first + " n=" + std::to_string(k.second);
      pl.series.push_back(std::move(s));
    }
    if (ac) pl.vlines = {*ac};
    em.plot("u1", pl);
  }
  return kOk;
}

struct GapfitOpts {
  double delta = 0.5;
  double kappa = 1.0;
  double u = 1.0;
  double dist_min = 1e-5;
  double dist_max = 1e-2;
  int samples = 16;
  bool plot = false;
};

// Two-sided 95% Student-t quantile (Cornish-Fisher expansion).
double t_quantile_975(int dof) {
  const double z = 1.959963984540054;
  const double v = dof;
  const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
  return z + (z3 + z) / (4 * v) + (5 * z5 + 16 * z3 + 3 * z) / (96 * v * v) +
         (3 * z7 + 19 * z5 + 17 * z3 - 15 * z) / (384 * v * v * v);
}

void cmd_gapfit(const GapfitOpts& o, const Globals&, Emitter& em) {
  require_range(o.dist_min, o.dist_max, "distance");
  require_at_least(o.samples, 8, "--samples");
  const auto q = resolve_u1(o.delta, o.kappa, o.u, 0.0);
  const double ac = u1::critical_alpha(q);
  const auto fit = u1::gap_fit(q, o.dist_min, o.dist_max, o.samples);

  double sxx = 0.0, mx = 0.0, ss_res = 0.0;
  for (const auto& s : fit.samples) mx += std::log(ac - s.alpha);
  mx /= fit.samples.size();
  for (const auto& s : fit.samples) {
    const double x = std::log(ac - s.alpha);
    const double r = std::log(s.gap) - (fit.intercept + fit.slope * x);
    sxx += (x - mx) * (x - mx);
    ss_res += r * r;
  }
  const int dof = static_cast<int>(fit.samples.size()) - 2;
  const double se = std::sqrt(ss_res / dof / sxx);
  const double half = t_quantile_975(dof) * se;

  Table t{"gapfit",
          {"alpha_c", "slope", "intercept", "r_squared", "ci95_low", "ci95_high",
           "alpha_min", "alpha_max", "reliable"},
          {}};
  t.add({ac, fit.slope, fit.intercept, fit.r_squared, fit.slope - half,
         fit.slope + half, fit.alpha_min, fit.alpha_max, fit.reliable ? 1L : 0L});
  em.table(t);
  Table ts{"gapfit_samples", {"alpha", "distance", "gap"}, {}};
  for (const auto& s : fit.samples) ts.add({s.alpha, ac - s.alpha, s.gap});
  em.table(ts);

  if (o.plot) {
    Plot pl;
    pl.title = "lower-branch gap near alpha_c";
    pl.xlabel = "alpha_c - alpha";
    pl.ylabel = "E_1 - E_0";
    pl.logx = pl.logy = true;
    Series pts{"samples", {}, {}, "#1f4e9c", 1.0, true};
    Series line{"fit", {}, {}, "#c0392b", 1.5};
    for (const auto& s : fit.samples) {
      const double d = ac - s.alpha;
      pts.x.push_back(d);
      pts.y.push_back(s.gap);
      line.x.push_back(d);
      line.y.push_back(std::exp(fit.intercept + fit.slope * std::log(d)));
    }
    pl.series = {line, pts};
    em.plot("gapfit", pl);
  }
}

std::string join_error(const Error& e) {
  std::string s = e.what();
  if (const auto* d = dynamic_cast<const DomainError*>(&e); d && !d->route_hint().empty()) {
    s += " (" + d->route_hint() + ")";
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out,
            std::ostream& err) {
  Globals g;
  std::vector<std::string> args = raw_args;
  try {
    g.tol = default_tolerance();
    if (auto path = find_config_path(args)) args = merge_config_file(args, *path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  CLI::App app{"Spectral solver for the anisotropic quantum Rabi-Stark model", "arsm"};
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--config", g.config, "JSON file of option defaults");
  app.add_option("--out", g.out_dir, "output directory (default: stdout)");
  app.add_option("--format", g.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")
      ->check(CLI::Range(1, 1024));
  app.add_option("--tol", g.tol, "G-series tolerance")->check(CLI::PositiveNumber);

  GcurveOpts gc;
  auto* s_gc = app.add_subcommand("gcurve", "G-functions on an energy grid");
  add_model_options(s_gc, gc.m, true);
  s_gc->add_option("--e-min", gc.e_min);
  s_gc->add_option("--e-max", gc.e_max);
  s_gc->add_option("--points", gc.points);
  s_gc->add_flag("--plot", gc.plot, "write an SVG");

  SpectrumOpts sp;
  auto* s_sp = app.add_subcommand("spectrum", "levels over a g1 sweep");
  add_model_options(s_sp, sp.m, false);
  s_sp->add_option("--g1-min", sp.g1_min);
  s_sp->add_option("--g1-max", sp.g1_max);
  s_sp->add_option("--g1-points", sp.g1_points);
  s_sp->add_option("--e-min", sp.e_min);
  s_sp->add_option("--e-max", sp.e_max);
  s_sp->add_option("--scan-points", sp.scan_points);
  s_sp->add_option("--juddian-poles", sp.juddian_poles);
  s_sp->add_flag("--plot", sp.plot, "write an SVG");

  PolesOpts po;
  auto* s_po = app.add_subcommand("poles", "pole ladder");
  add_model_options(s_po, po.m, true);
  s_po->add_option("--m-max", po.m_max);

  CriticalOpts cr;
  auto* s_cr = app.add_subcommand("critical", "first-order critical coupling");
  add_model_options(s_cr, cr.m, false);
  s_cr->add_option("--g1-min", cr.g1_min);
  s_cr->add_option("--g1-max", cr.g1_max);
  s_cr->add_option("--n-trunc", cr.n_trunc);
  s_cr->add_option("--ed-points", cr.ed_points);
  s_cr->add_flag("--no-ed", cr.no_ed, "skip the ED cross-check");

  CrossingOpts cx;
  auto* s_cx = app.add_subcommand("crossing", "level crossings on a pole line");
  add_model_options(s_cx, cx.m, false);
  s_cx->add_option("--pole", cx.pole, "pole index (0: ground-state crossing)");
  s_cx->add_option("--g1-min", cx.g1_min);
  s_cx->add_option("--g1-max", cx.g1_max);
  s_cx->add_option("--points", cx.points);
  s_cx->add_option("--n-trunc", cx.n_trunc);

  EdOpts eo;
  auto* s_ed = app.add_subcommand("ed", "exact diagonalization");
  add_model_options(s_ed, eo.m, true);
  s_ed->add_option("--n-trunc", eo.n_trunc);
  s_ed->add_option("--levels", eo.levels);
  s_ed->add_flag("--no-check", eo.no_check, "skip the truncation-doubling check");

  U1Opts uo;
  auto* s_u1 = app.add_subcommand("u1", "unit-Stark branch levels");
  s_u1->add_option("--delta", uo.delta);
  s_u1->add_option("--kappa", uo.kappa);
  s_u1->add_option("--u", uo.u, "+1 or -1");
  s_u1->add_option("--alpha", uo.alpha);
  s_u1->add_option("--alpha-min", uo.alpha_min);
  s_u1->add_option("--alpha-max", uo.alpha_max);
  s_u1->add_option("--alpha-points", uo.alpha_points);
  s_u1->add_option("--levels", uo.levels);
  s_u1->add_option("--branch", uo.branch)
      ->check(CLI::IsMember({"lower", "upper", "both"}));
  s_u1->add_flag("--plot", uo.plot, "write an SVG");

  GapfitOpts gf;
  auto* s_gf = app.add_subcommand("gapfit", "gap exponent near alpha_c");
  s_gf->add_option("--delta", gf.delta);
  s_gf->add_option("--kappa", gf.kappa);
  s_gf->add_option("--u", gf.u, "+1 or -1");
  s_gf->add_option("--dist-min", gf.dist_min);
  s_gf->add_option("--dist-max", gf.dist_max);
  s_gf->add_option("--samples", gf.samples);
  s_gf->add_flag("--plot", gf.plot, "write an SVG");

  std::vector<const char*> argv{"arsm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Emitter em(g, {sub->get_name(), collect_params(sub, g)}, out);
  try {
    if (sub == s_gc) cmd_gcurve(gc, g, em);
    else if (sub == s_sp) cmd_spectrum(sp, g, em);
    else if (sub == s_po) cmd_poles(po, g, em);
    else if (sub == s_cr) cmd_critical(cr, g, em);
    else if (sub == s_cx) cmd_crossing(cx, g, em);
    else if (sub == s_ed) cmd_ed(eo, g, em);
    else if (sub == s_u1) return cmd_u1(uo, g, em, err);
    else if (sub == s_gf) cmd_gapfit(gf, g, em);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << join_error(e) << "\n";
    return kConfigError;
  } catch (const DegenerateCoupling& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace arsm::cli
