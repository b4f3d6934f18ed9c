#include "netcage/sim/dataset.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"
#include "netcage/core/rng.hpp"

namespace netcage::sim {

Matrix LfDataset::deformation(Index row) const {
  Matrix D(kNodeCount, 3);
  for (Index i = 0; i < kNodeCount; ++i) D.row(i) = displacements.row(row).segment<3>(3 * i);
  return D;
}

LfDataset LfDataset::subset(const std::vector<Index>& rows) const {
  LfDataset out;
  out.param_hash = param_hash;
  out.seed = seed;
  out.displacements.resize(static_cast<Index>(rows.size()), displacements.cols());
  out.tensions.resize(static_cast<Index>(rows.size()), tensions.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= size()) raise(ErrorCode::InvalidArgument, "subset row out of range");
    out.scenario.push_back(scenario[static_cast<std::size_t>(r)]);
    out.states.push_back(states[static_cast<std::size_t>(r)]);
    out.displacements.row(static_cast<Index>(k)) = displacements.row(r);
    out.tensions.row(static_cast<Index>(k)) = tensions.row(r);
  }
  return out;
}

HfDataset HfDataset::subset(const std::vector<Index>& rows) const {
  HfDataset out;
  out.param_hash = param_hash;
  out.seed = seed;
  out.shackles.resize(static_cast<Index>(rows.size()), shackles.cols());
  out.depths.resize(static_cast<Index>(rows.size()), depths.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= size()) raise(ErrorCode::InvalidArgument, "subset row out of range");
    out.scenario.push_back(scenario[static_cast<std::size_t>(r)]);
    out.states.push_back(states[static_cast<std::size_t>(r)]);
    out.shackles.row(static_cast<Index>(k)) = shackles.row(r);
    out.depths.row(static_cast<Index>(k)) = depths.row(r);
  }
  return out;
}

SimulationRun simulate(int n, std::uint64_t seed, const CageParams& params, const SeaStateRanges& ranges,
                       int threads) {
  return simulate_states(sample_sea_states(n, ranges, seed), seed, params, threads);
}

SimulationRun simulate_states(const std::vector<SeaState>& states, std::uint64_t seed, const CageParams& params,
                              int threads) {
  const auto topo = build_topology(params.geometry);
  const CageSolver solver(topo, params);
  const auto n = static_cast<Index>(states.size());

  struct Slot {
    bool ok = false;
    Equilibrium eq;
    SensorReadings hf;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));
  std::atomic<Index> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto work = [&] {
    for (Index s = next++; s < n; s = next++) {
      auto& slot = slots[static_cast<std::size_t>(s)];
      const auto& sea = states[static_cast<std::size_t>(s)];
      try {
        slot.eq = solver.solve(sea);
        const auto hf = synth_high_fidelity(slot.eq.deformation, slot.eq.loads, sea, params.discrepancy,
                                            mix_seed(seed, 0x100000 + static_cast<std::uint64_t>(s)));
        slot.hf = sensor_extract(hf.deformation, hf.loads, params.sensors, topo.rest_positions);
        slot.ok = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoConvergence) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          return;
        }
        log::warn("scenario " + std::to_string(s + 1) + ": " + e.what());
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
    }
  };

  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<Index>(workers, std::max<Index>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);

  SimulationRun run;
  Index ok = 0;
  for (const auto& s : slots) ok += s.ok ? 1 : 0;
  auto& lf = run.lf;
  auto& hf = run.hf;
  lf.param_hash = hf.param_hash = params.hash();
  lf.seed = hf.seed = seed;
  lf.displacements.resize(ok, 3 * kNodeCount);
  lf.tensions.resize(ok, kMooringLines);
  hf.shackles.resize(ok, kShackles);
  hf.depths.resize(ok, kDepthSensors);
  Index r = 0;
  for (Index s = 0; s < n; ++s) {
    const auto& slot = slots[static_cast<std::size_t>(s)];
    if (!slot.ok) {
      run.failures.push_back(static_cast<int>(s + 1));
      continue;
    }
    const int id = static_cast<int>(s + 1);
    lf.scenario.push_back(id);
    hf.scenario.push_back(id);
    lf.states.push_back(states[static_cast<std::size_t>(s)]);
    hf.states.push_back(states[static_cast<std::size_t>(s)]);
    const Matrix& D = slot.eq.deformation.displacements;
    for (Index i = 0; i < kNodeCount; ++i) lf.displacements.row(r).segment<3>(3 * i) = D.row(i);
    lf.tensions.row(r) = slot.eq.loads.tensions.transpose();
    hf.shackles.row(r) = slot.hf.shackle_loads.transpose();
    hf.depths.row(r) = slot.hf.depth_displacements.transpose();
    run.max_iterations = std::max(run.max_iterations, slot.eq.iterations);
    run.max_residual = std::max(run.max_residual, slot.eq.residual);
    ++r;
  }
  return run;
}

SensorReadings lf_sensor_row(const LfDataset& lf, Index row, const SensorConfig& cfg, const Matrix& rest) {
  CageDeformation def{lf.deformation(row), lf.states[static_cast<std::size_t>(row)]};
  MooringLoads loads{lf.tensions.row(row).transpose()};
  return sensor_extract(def, loads, cfg, rest);
}

Matrix lf_series(const LfDataset& lf, Index row, const SeriesParams& series) {
  const auto r = static_cast<std::size_t>(row);
  return scenario_series(lf.deformation(row), lf.states[r], series,
                         mix_seed(lf.seed, 0x200000 + static_cast<std::uint64_t>(lf.scenario[r])));
}

std::vector<std::string> sea_state_columns() { return {"current_speed", "current_dir", "hs", "tp", "wave_dir"}; }

namespace {

const std::vector<std::string> kSeaUnits{"m/s", "deg", "m", "s", "deg"};

void put_header(Table& t, const std::string& hash, std::uint64_t seed) {
  t.comments.push_back("param_hash=" + hash);
  t.comments.push_back("seed=" + std::to_string(seed));
  t.add_column("scenario", "");
  const auto names = sea_state_columns();
  for (std::size_t k = 0; k < names.size(); ++k) t.add_column(names[k], kSeaUnits[k]);
}

void put_states(Matrix& V, const std::vector<int>& ids, const std::vector<SeaState>& states) {
  for (std::size_t r = 0; r < states.size(); ++r) {
    const auto& s = states[r];
    V.row(static_cast<Index>(r)).head(6) << ids[r], s.current_speed, s.current_dir, s.sig_wave_height, s.peak_period,
        s.wave_dir;
  }
}

std::string comment_value(const Table& t, const std::string& key) {
  for (const auto& c : t.comments) {
    auto pos = c.find('=');
    if (pos == std::string::npos) continue;
    std::string k = c.substr(0, pos);
    while (!k.empty() && k.front() == ' ') k.erase(k.begin());
    if (k == key) return c.substr(pos + 1);
  }
  return {};
}

void get_states(const Table& t, std::vector<int>& ids, std::vector<SeaState>& states, std::string& hash,
                std::uint64_t& seed) {
  const Vector id = t.column("scenario");
  const auto names = sea_state_columns();
  std::array<Vector, 5> c;
  for (std::size_t k = 0; k < 5; ++k) c[k] = t.column(names[k]);
  for (Index r = 0; r < t.rows(); ++r) {
    ids.push_back(static_cast<int>(id(r)));
    states.push_back({c[0](r), c[1](r), c[2](r), c[3](r), c[4](r)});
  }
  hash = comment_value(t, "param_hash");
  const auto s = comment_value(t, "seed");
  seed = s.empty() ? 0 : std::stoull(s);
}

}  // namespace

Table to_table(const LfDataset& lf) {
  Table t;
  put_header(t, lf.param_hash, lf.seed);
  static const char* axis[] = {"x", "y", "z"};
  for (Index i = 0; i < kNodeCount; ++i)
    for (int c = 0; c < 3; ++c) t.add_column("n" + std::to_string(i + 1) + "_" + axis[c], "m");
  for (int j = 0; j < kMooringLines; ++j) t.add_column("T" + std::to_string(j + 1), "kN");
  t.values.resize(lf.size(), static_cast<Index>(t.names.size()));
  put_states(t.values, lf.scenario, lf.states);
  t.values.middleCols(6, 3 * kNodeCount) = lf.displacements;
  t.values.rightCols(kMooringLines) = lf.tensions;
  return t;
}

Table to_table(const HfDataset& hf) {
  Table t;
  put_header(t, hf.param_hash, hf.seed);
  for (int k = 0; k < kShackles; ++k) t.add_column("shackle" + std::to_string(k + 1), "kN");
  for (int k = 0; k < kDepthSensors; ++k) t.add_column("depth" + std::to_string(k + 1), "m");
  t.values.resize(hf.size(), static_cast<Index>(t.names.size()));
  put_states(t.values, hf.scenario, hf.states);
  t.values.middleCols(6, kShackles) = hf.shackles;
  t.values.rightCols(kDepthSensors) = hf.depths;
  return t;
}

LfDataset lf_from_table(const Table& t) {
  LfDataset lf;
  get_states(t, lf.scenario, lf.states, lf.param_hash, lf.seed);
  const Index first = t.column_index("n1_x");
  const Index tens = t.column_index("T1");
  if (t.column_index("n321_z") != first + 3 * kNodeCount - 1 || t.column_index("T12") != tens + kMooringLines - 1)
    raise(ErrorCode::SchemaViolation, "displacement or tension columns are not contiguous");
  lf.displacements = t.values.middleCols(first, 3 * kNodeCount);
  lf.tensions = t.values.middleCols(tens, kMooringLines);
  return lf;
}

HfDataset hf_from_table(const Table& t) {
  HfDataset hf;
  get_states(t, hf.scenario, hf.states, hf.param_hash, hf.seed);
  hf.shackles.resize(t.rows(), kShackles);
  hf.depths.resize(t.rows(), kDepthSensors);
  for (int k = 0; k < kShackles; ++k) hf.shackles.col(k) = t.column("shackle" + std::to_string(k + 1));
  for (int k = 0; k < kDepthSensors; ++k) hf.depths.col(k) = t.column("depth" + std::to_string(k + 1));
  return hf;
}

}  // namespace netcage::sim
