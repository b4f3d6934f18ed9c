// netcage: command-line front end for the net-cage twin.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"
#include "netcage/pca/pca.hpp"
#include "netcage/sim/dataset.hpp"
#include "netcage/sim/params.hpp"
#include "netcage/twin/evaluate.hpp"
#include "netcage/twin/service.hpp"

using namespace netcage;
namespace fs = std::filesystem;

namespace {

sim::CageParams params_from(const std::string& path) {
  return sim::load_params(path.empty() ? sim::default_params_path() : path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) raise(ErrorCode::UnreadableSource, "cannot write " + path);
  return f;
}

void print_table(const Table& t) { std::cout << format_table_text(t); }

// ---- topology

int cmd_topology(const std::string& params_path, const std::string& nodes_path, const std::string& edges_path) {
  const auto topo = sim::build_topology(params_from(params_path).geometry);
  Table nodes;
  for (const char* c : {"node", "layer", "position"}) nodes.add_column(c, "");
  for (const char* c : {"x", "y", "z"}) nodes.add_column(c, "m");
  nodes.add_column("degree", "");
  nodes.values.resize(topo.node_count, 7);
  const auto deg = topo.degrees();
  for (Index i = 0; i < topo.node_count; ++i)
    nodes.values.row(i) << static_cast<double>(i + 1), static_cast<double>(sim::layer_of(i)),
        static_cast<double>(sim::position_of(i) + 1), topo.rest_positions.row(i), static_cast<double>(deg[i]);
  Table edges;
  edges.add_column("from", "");
  edges.add_column("to", "");
  edges.values.resize(static_cast<Index>(topo.edges.size()), 2);
  for (std::size_t e = 0; e < topo.edges.size(); ++e)
    edges.values.row(static_cast<Index>(e)) << static_cast<double>(topo.edges[e].first + 1),
        static_cast<double>(topo.edges[e].second + 1);
  if (!nodes_path.empty()) write_table(nodes, nodes_path);
  if (!edges_path.empty()) write_table(edges, edges_path);
  if (nodes_path.empty() && edges_path.empty()) print_table(edges);
  std::map<Index, int> hist;
  for (auto d : deg) ++hist[d];
  std::cerr << topo.node_count << " nodes, " << topo.edges.size() << " edges; degrees";
  for (auto [d, n] : hist) std::cerr << ' ' << n << "x" << d;
  std::cerr << '\n';
  return 0;
}

// ---- simulate

struct SimulateArgs {
  int n = 1000;
  std::uint64_t seed = 0;
  std::string params;
  std::string lf_out = "lf.csv";
  std::string hf_out = "hf.csv";
  int threads = 0;
  bool no_waves = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto params = params_from(a.params);
  sim::SeaStateRanges ranges;
  ranges.waves = !a.no_waves;
  const auto run = sim::simulate(a.n, a.seed, params, ranges, a.threads);
  write_table(sim::to_table(run.lf), a.lf_out);
  if (!a.hf_out.empty()) write_table(sim::to_table(run.hf), a.hf_out);
  std::cerr << run.lf.size() << " scenarios (" << run.failures.size() << " failed), params " << run.lf.param_hash
            << ", max residual " << run.max_residual << '\n';
  return 0;
}

// ---- reduce

int cmd_reduce(const std::string& params_path, const std::string& lf_path, double threshold, bool centered,
               const std::string& out) {
  const auto lf = sim::lf_from_table(read_table(lf_path));
  const auto params = params_from(params_path);
  std::vector<Matrix> series;
  for (Index r = 0; r < lf.size(); ++r) series.push_back(sim::lf_series(lf, r, params.series));
  const auto M = pca::assemble_data_matrix(series, params.series.transient_fraction);
  const auto basis = pca::fit_pca(M, threshold, centered);
  Table t;
  t.add_column("component", "");
  t.add_column("eigenvalue", "m^2");
  t.add_column("cumulative", "");
  const Index c = basis.total_components();
  t.values.resize(c, 3);
  for (Index p = 0; p < c; ++p)
    t.values.row(p) << static_cast<double>(p + 1), basis.eigenvalues(p), pca::explained_variance(basis.eigenvalues, p + 1);
  t.comments.push_back("threshold " + std::to_string(threshold) + " retains " + std::to_string(basis.retained));
  if (out.empty())
    print_table(t);
  else
    write_table(t, out);
  std::cerr << "retained " << basis.retained << " of " << c << " components ("
            << pca::explained_variance(basis.eigenvalues, basis.retained) << " of the variance)\n";
  return 0;
}

// ---- train

struct TrainArgs {
  std::string lf, hf, params, out = "twin.nctwin", mode = "gp-pca";
  twin::TrainConfig cfg;
};

int cmd_train(TrainArgs a) {
  a.cfg.mode = twin::parse_mode(a.mode);
  const auto lf = sim::lf_from_table(read_table(a.lf));
  const auto hf = sim::hf_from_table(read_table(a.hf));
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = twin::train_bundle(lf, hf, params_from(a.params), a.cfg);
  twin::save_bundle(b, a.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "bundle " << b.id << " (" << twin::to_string(b.mode) << ", k = " << b.basis.retained << ") written to "
            << a.out << " in " << secs << " s\n";
  return 0;
}

// ---- predict / serve

std::vector<twin::MetoceanRecord> read_inputs(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  if (ext == ".jsonl" || ext == ".json") {
    auto r = twin::ingest_metocean_file(path);
    for (const auto& p : r.problems) log::warn(p);
    return r.records;
  }
  const auto t = read_table(path);
  const auto names = sim::sea_state_columns();
  std::vector<sim::SeaState> states;
  std::vector<int> ids;
  const auto sc = t.find("scenario");
  for (Index r = 0; r < t.rows(); ++r) {
    states.push_back({t.values(r, t.column_index(names[0])), t.values(r, t.column_index(names[1])),
                      t.values(r, t.column_index(names[2])), t.values(r, t.column_index(names[3])),
                      t.values(r, t.column_index(names[4]))});
    ids.push_back(sc ? static_cast<int>(t.values(r, *sc)) : static_cast<int>(r + 1));
  }
  return twin::records_from_states(ids, states);
}

struct PredictArgs {
  std::string bundle, input, out, mode, deformation_dir;
  bool inline_deformation = false;
  bool no_deformation = false;
};

twin::PredictOptions predict_options(const std::string& mode, bool no_deformation) {
  twin::PredictOptions o;
  if (!mode.empty()) o.mode = twin::parse_mode(mode);
  o.deformation = !no_deformation;
  return o;
}

int cmd_predict(const PredictArgs& a) {
  twin::TwinService svc(std::make_shared<const twin::TwinBundle>(twin::load_bundle(a.bundle)));
  const auto records = read_inputs(a.input);
  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  if (!a.deformation_dir.empty()) fs::create_directories(a.deformation_dir);
  const auto opt = predict_options(a.mode, a.no_deformation);
  std::vector<double> lat;
  for (const auto& rec : records) {
    const auto s = svc.predict(rec, opt);
    std::string sidecar;
    if (!a.deformation_dir.empty() && s.deformation.size() > 0) {
      Table t;
      t.add_column("node", "");
      for (const char* c : {"ux", "uy", "uz"}) t.add_column(c, "m");
      t.values.resize(s.deformation.rows(), 4);
      t.values.col(0) = Vector::LinSpaced(s.deformation.rows(), 1.0, static_cast<double>(s.deformation.rows()));
      t.values.rightCols(3) = s.deformation;
      sidecar = (fs::path(a.deformation_dir) / (s.timestamp + ".csv")).string();
      for (char& c : sidecar)
        if (c == ':') c = '-';
      write_table(t, sidecar);
    }
    out << twin::snapshot_to_json(s, a.inline_deformation, sidecar) << '\n';
    lat.push_back(s.provenance.latency_ms);
  }
  if (!lat.empty())
    std::cerr << lat.size() << " snapshots, median latency " << twin::percentile(lat, 0.5) << " ms\n";
  return 0;
}

struct ServeArgs {
  std::string bundle, stream = "-", out, mode, deformation_dir;
  bool inline_deformation = false;
  bool no_deformation = false;
  bool watch = false;
};

int cmd_serve(const ServeArgs& a) {
  twin::TwinService svc(std::make_shared<const twin::TwinBundle>(twin::load_bundle(a.bundle)));
  std::ifstream in_file;
  if (a.stream != "-") {
    in_file.open(a.stream);
    if (!in_file) raise(ErrorCode::UnreadableSource, "cannot open stream " + a.stream);
  }
  std::istream& in = a.stream == "-" ? std::cin : in_file;
  std::ofstream out_file;
  if (!a.out.empty()) out_file = open_out(a.out);
  std::ostream& out = a.out.empty() ? std::cout : out_file;
  if (!a.deformation_dir.empty()) fs::create_directories(a.deformation_dir);

  twin::ServeOptions opt;
  opt.predict = predict_options(a.mode, a.no_deformation);
  opt.inline_deformation = a.inline_deformation;
  opt.deformation_dir = a.deformation_dir;
  // Hot reload: a retrained bundle written over the same path replaces the
  // served one between records. A file that fails to load leaves the old one.
  auto stamp = fs::last_write_time(a.bundle);
  if (a.watch)
    opt.between_records = [&] {
      std::error_code ec;
      const auto now = fs::last_write_time(a.bundle, ec);
      if (ec || now == stamp) return;
      stamp = now;
      try {
        svc.replace(std::make_shared<const twin::TwinBundle>(twin::load_bundle(a.bundle)));
        log::info("reloaded bundle " + svc.bundle()->id);
      } catch (const Error& e) {
        log::warn(std::string("bundle reload failed: ") + e.what());
      }
    };
  const auto st = twin::serve(svc, in, out, opt);
  std::cerr << st.records << " snapshots, " << st.skipped << " skipped, " << st.out_of_range << " out of range";
  if (!st.latency_ms.empty())
    std::cerr << ", latency p50 " << twin::percentile(st.latency_ms, 0.5) << " ms, p99 "
              << twin::percentile(st.latency_ms, 0.99) << " ms";
  std::cerr << '\n';
  return 0;
}

// ---- evaluate / report

void write_reports(const std::vector<twin::QuantityReport>& reps, const std::string& dir) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  write_table(twin::mae_table(reps), fs::path(dir) / "mae.csv");
  for (const auto& r : reps) {
    write_table(twin::density_table(r.lf), fs::path(dir) / ("density_" + r.name + "_lf.csv"));
    write_table(twin::density_table(r.nargp), fs::path(dir) / ("density_" + r.name + "_nargp.csv"));
  }
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path, Index bins, const std::string& out_dir) {
  const auto truth = sim::hf_from_table(read_table(truth_path));
  std::map<std::string, Index> row_of;
  for (Index r = 0; r < truth.size(); ++r)
    row_of["scenario-" + std::to_string(truth.scenario[static_cast<std::size_t>(r)])] = r;
  std::ifstream in(pred_path);
  if (!in) raise(ErrorCode::UnreadableSource, "cannot open " + pred_path);
  std::vector<Index> rows;
  std::vector<twin::TwinSnapshot> snaps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto s = twin::snapshot_from_json(line);
    const auto it = row_of.find(s.timestamp);
    if (it == row_of.end()) {
      log::warn("no truth record for " + s.timestamp);
      continue;
    }
    rows.push_back(it->second);
    snaps.push_back(std::move(s));
  }
  if (snaps.empty()) raise(ErrorCode::LengthMismatch, "no prediction matches a truth record");
  const auto n = static_cast<Index>(snaps.size());
  const auto names = twin::quantity_names();
  std::vector<twin::QuantityReport> reps;
  for (std::size_t q = 0; q < names.size(); ++q) {
    const auto Q = static_cast<Index>(q);
    Vector lf(n), mf(n), y(n);
    for (Index i = 0; i < n; ++i) {
      const auto& s = snaps[static_cast<std::size_t>(i)];
      const Index r = rows[static_cast<std::size_t>(i)];
      if (Q < sim::kShackles) {
        lf(i) = s.lf_shackle_loads(Q), mf(i) = s.shackle_loads(Q), y(i) = truth.shackles(r, Q);
      } else {
        const Index k = Q - sim::kShackles;
        lf(i) = s.lf_depth_displacements(k), mf(i) = s.depth_displacements(k), y(i) = truth.depths(r, k);
      }
    }
    twin::QuantityReport rep;
    rep.name = names[q];
    rep.unit = Q < sim::kShackles ? "kN" : "m";
    rep.lf = twin::evaluate(lf, y, bins);
    rep.nargp = twin::evaluate(mf, y, bins);
    reps.push_back(std::move(rep));
  }
  print_table(twin::mae_table(reps));
  write_reports(reps, out_dir);
  return 0;
}

int cmd_report(const std::string& bundle_path, const std::string& lf_path, const std::string& hf_path, Index bins,
               const std::string& out_dir) {
  const auto b = twin::load_bundle(bundle_path);
  std::cout << "# bundle " << b.id << ", mode " << twin::to_string(b.mode) << ", k = " << b.basis.retained << " ("
            << pca::explained_variance(b.basis.eigenvalues, b.basis.retained) << " of the variance)\n";
  if (!hf_path.empty()) {
    const auto reps = twin::evaluate_sensors(b, sim::hf_from_table(read_table(hf_path)), bins);
    print_table(twin::mae_table(reps));
    write_reports(reps, out_dir);
  }
  if (!lf_path.empty()) {
    const auto lf = sim::lf_from_table(read_table(lf_path));
    std::vector<std::pair<twin::DeformationMode, twin::AxisSummary>> rows;
    rows.emplace_back(twin::DeformationMode::GpPca,
                      twin::summarize_axes(twin::deformation_errors(b, lf, twin::DeformationMode::GpPca)));
    if (b.gcn)
      rows.emplace_back(twin::DeformationMode::Gcn,
                        twin::summarize_axes(twin::deformation_errors(b, lf, twin::DeformationMode::Gcn)));
    const auto t = twin::deformation_table(rows);
    print_table(t);
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      write_table(t, fs::path(out_dir) / "deformation.csv");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifidelity digital twin of an aquaculture net cage"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  std::string params_path;
  std::function<int()> run;

  auto* topo = app.add_subcommand("topology", "Emit the cage graph");
  std::string nodes_path, edges_path;
  topo->add_option("--params", params_path, "Cage parameter file");
  topo->add_option("--nodes", nodes_path, "Node table output");
  topo->add_option("--edges", edges_path, "Edge table output (stdout if neither is given)");
  topo->callback([&] { run = [&] { return cmd_topology(params_path, nodes_path, edges_path); }; });

  auto* simc = app.add_subcommand("simulate", "Generate simulated and synthetic field datasets");
  SimulateArgs sa;
  simc->add_option("--n", sa.n, "Scenario count")->check(CLI::PositiveNumber);
  simc->add_option("--seed", sa.seed, "Seed");
  simc->add_option("--params", sa.params, "Cage parameter file");
  simc->add_option("--lf", sa.lf_out, "Low-fidelity dataset output (.csv or .ncb)");
  simc->add_option("--hf", sa.hf_out, "Synthetic field dataset output (empty to skip)");
  simc->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");
  simc->add_flag("--no-waves", sa.no_waves, "Pin wave height and period to zero");
  simc->callback([&] { run = [&] { return cmd_simulate(sa); }; });

  auto* red = app.add_subcommand("reduce", "Principal components of the simulated deformations");
  std::string red_lf, red_out;
  double threshold = 0.93;
  bool centered = false;
  red->add_option("--lf", red_lf, "Low-fidelity dataset")->required();
  red->add_option("--threshold", threshold, "Cumulative explained-variance threshold")->check(CLI::Range(0.0, 1.0));
  red->add_option("--params", params_path, "Cage parameter file (series settings)");
  red->add_flag("--center", centered, "Subtract the mean snapshot first");
  red->add_option("--out", red_out, "Spectrum table output");
  red->callback([&] { run = [&] { return cmd_reduce(params_path, red_lf, threshold, centered, red_out); }; });

  auto* tr = app.add_subcommand("train", "Train a twin bundle");
  TrainArgs ta;
  int gcn_epochs = ta.cfg.gcn.epochs;
  tr->add_option("--lf", ta.lf, "Low-fidelity dataset")->required();
  tr->add_option("--hf", ta.hf, "Field dataset")->required();
  tr->add_option("--params", ta.params, "Cage parameter file the datasets were generated with");
  tr->add_option("--mode", ta.mode, "Deformation surrogate")->check(CLI::IsMember({"gp-pca", "gcn"}));
  tr->add_option("--seed", ta.cfg.seed, "Seed");
  tr->add_option("--out", ta.out, "Bundle output");
  tr->add_option("--threshold", ta.cfg.pca_threshold, "PCA threshold")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--lf-cap", ta.cfg.lf_cap, "Scenarios per low-fidelity GP")->check(CLI::PositiveNumber);
  tr->add_option("--restarts", ta.cfg.lf_fit.restarts, "Optimizer restarts for the low-fidelity GPs");
  tr->add_option("--hf-restarts", ta.cfg.hf_fit.restarts, "Optimizer restarts for the level-2 GPs");
  tr->add_option("--hf-depth-fraction", ta.cfg.hf_depth_fraction, "Share of field records per depth model");
  tr->add_option("--hf-shackle-fraction", ta.cfg.hf_shackle_fraction, "Share of field records per shackle model");
  tr->add_option("--gcn-scenarios", ta.cfg.gcn_scenarios, "Scenarios used to train the GCN");
  tr->add_option("--gcn-epochs", gcn_epochs, "GCN epochs");
  tr->add_option("--gcn-lr", ta.cfg.gcn.learning_rate, "GCN learning rate");
  tr->add_option("--gcn-hidden", ta.cfg.gcn.hidden, "GCN hidden width");
  tr->callback([&] {
    run = [&] {
      ta.cfg.gcn.epochs = gcn_epochs;
      return cmd_train(ta);
    };
  });

  auto* pr = app.add_subcommand("predict", "Predict snapshots for a batch of sea states");
  PredictArgs pa;
  pr->add_option("--bundle", pa.bundle, "Bundle file")->required();
  pr->add_option("--input", pa.input, "Metocean records (.jsonl) or a sea-state table")->required();
  pr->add_option("--out", pa.out, "Snapshot output (stdout if empty)");
  pr->add_option("--mode", pa.mode, "Override the deformation surrogate")->check(CLI::IsMember({"gp-pca", "gcn"}));
  pr->add_option("--deformation-dir", pa.deformation_dir, "Write one deformation table per snapshot here");
  pr->add_flag("--inline-deformation", pa.inline_deformation, "Embed the deformation in each snapshot");
  pr->add_flag("--no-deformation", pa.no_deformation, "Sensors only");
  pr->callback([&] { run = [&] { return cmd_predict(pa); }; });

  auto* sv = app.add_subcommand("serve", "Stream snapshots for a metocean feed");
  ServeArgs va;
  sv->add_option("--bundle", va.bundle, "Bundle file")->required();
  sv->add_option("--stream", va.stream, "Metocean stream (- for stdin)");
  sv->add_option("--out", va.out, "Snapshot output (stdout if empty)");
  sv->add_option("--mode", va.mode, "Override the deformation surrogate")->check(CLI::IsMember({"gp-pca", "gcn"}));
  sv->add_option("--deformation-dir", va.deformation_dir, "Write one deformation table per snapshot here");
  sv->add_flag("--inline-deformation", va.inline_deformation, "Embed the deformation in each snapshot");
  sv->add_flag("--no-deformation", va.no_deformation, "Sensors only");
  sv->add_flag("--watch", va.watch, "Reload the bundle when its file changes");
  sv->callback([&] { run = [&] { return cmd_serve(va); }; });

  auto* ev = app.add_subcommand("evaluate", "Score snapshots against field records");
  std::string ev_pred, ev_truth, ev_dir;
  Index bins = 60;
  ev->add_option("--pred", ev_pred, "Snapshots (.jsonl)")->required();
  ev->add_option("--truth", ev_truth, "Field dataset; records match on timestamp scenario-<id>")->required();
  ev->add_option("--bins", bins, "Density grid size")->check(CLI::PositiveNumber);
  ev->add_option("--out-dir", ev_dir, "Directory for MAE and density tables");
  ev->callback([&] { run = [&] { return cmd_evaluate(ev_pred, ev_truth, bins, ev_dir); }; });

  auto* rp = app.add_subcommand("report", "MAE tables, density bins and deformation errors for a holdout");
  std::string rp_bundle, rp_lf, rp_hf, rp_dir;
  rp->add_option("--bundle", rp_bundle, "Bundle file")->required();
  rp->add_option("--lf", rp_lf, "Held-out low-fidelity dataset (deformation errors)");
  rp->add_option("--hf", rp_hf, "Held-out field dataset (sensor errors)");
  rp->add_option("--bins", bins, "Density grid size")->check(CLI::PositiveNumber);
  rp->add_option("--out-dir", rp_dir, "Directory for the tables");
  rp->callback([&] { run = [&] { return cmd_report(rp_bundle, rp_lf, rp_hf, bins, rp_dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  log::set_level(quiet ? log::Level::Quiet : verbose ? log::Level::Info : log::Level::Warn);
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
