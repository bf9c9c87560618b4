#include "grom/database.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "grom/errors.hpp"
#include "grom/matrix_io.hpp"

namespace grom {

using nlohmann::json;

Eigen::VectorXd TrainingDatabase::parameters() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(triplets.size()));
  for (std::size_t i = 0; i < triplets.size(); ++i) p(static_cast<Eigen::Index>(i)) = triplets[i].parameter;
  return p;
}

void TrainingDatabase::validate() const {
  if (triplets.size() < 2) {
    throw ValidationError("TrainingDatabase '" + field_name + "': need >= 2 training parameters, got " +
                          std::to_string(triplets.size()));
  }
  if (rank < 1) {
    throw ValidationError("TrainingDatabase '" + field_name + "': rank must be >= 1");
  }
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (i > 0 && !(t.parameter > triplets[i - 1].parameter)) {
      throw ValidationError("TrainingDatabase '" + field_name +
                            "': parameters not strictly increasing at index " + std::to_string(i));
    }
    if (t.phi.cols() != rank || t.psi.cols() != rank || t.sigma.size() != rank) {
      throw ValidationError("TrainingDatabase '" + field_name + "': triplet " + std::to_string(i) +
                            " rank disagrees with declared rank " + std::to_string(rank));
    }
    if (t.phi.rows() != mean.values.size() || t.psi.rows() != times.size()) {
      throw ValidationError("TrainingDatabase '" + field_name + "': triplet " + std::to_string(i) +
                            " dimensions disagree with mean/time grid");
    }
  }
}

TrainingDatabase train_database(const std::vector<SnapshotSet>& sets, int rank,
                                double ric_threshold) {
  if (sets.size() < 2) {
    throw ValidationError("train_database: need >= 2 training snapshot sets, got " +
                          std::to_string(sets.size()));
  }
  if ((rank > 0) == (ric_threshold > 0.0)) {
    throw ValidationError("train_database: choose exactly one of fixed rank or RIC threshold");
  }

  std::vector<SnapshotSet> sorted = sets;
  std::sort(sorted.begin(), sorted.end(),
            [](const SnapshotSet& a, const SnapshotSet& b) { return a.parameter < b.parameter; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].parameter > sorted[i - 1].parameter)) {
      throw ValidationError("train_database: duplicate training parameter " +
                            std::to_string(sorted[i].parameter));
    }
  }

  TrainingDatabase db;
  db.field_name = sorted.front().field_name;
  db.times = sorted.front().times;
  db.mean = compute_global_mean(sorted);

  std::vector<SnapshotSet> fluct;
  fluct.reserve(sorted.size());
  for (const auto& s : sorted) fluct.push_back(subtract_mean(s, db.mean));

  int q = rank;
  if (ric_threshold > 0.0) {
    q = 0;
    for (const auto& f : fluct) {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(f.data);
      const Eigen::VectorXd lambda = svd.singularValues().array().square();
      q = std::max(q, rank_for_ric(lambda, ric_threshold));
    }
  }
  db.rank = q;
  for (const auto& f : fluct) db.triplets.push_back(pod_decompose(f, q));
  db.validate();
  return db;
}

void DatabaseManifest::validate() const {
  if (parameters.size() < 2) {
    throw ValidationError("manifest: need >= 2 training parameters, got " +
                          std::to_string(parameters.size()));
  }
  for (std::size_t i = 1; i < parameters.size(); ++i) {
    if (!(parameters[i] > parameters[i - 1])) {
      throw ValidationError("manifest: parameters not strictly increasing at index " +
                            std::to_string(i));
    }
  }
  if (snapshot_count < 2 || !(t_end > t_start)) {
    throw ValidationError("manifest: invalid time grid");
  }
  if (fields.empty()) {
    throw ValidationError("manifest: no fields declared");
  }
  for (const auto& f : fields) {
    if (f.rank < 1) {
      throw ValidationError("manifest: field '" + f.name + "' has rank < 1");
    }
    if (f.triplet_dirs.size() != parameters.size() || f.eigenvalues.size() != parameters.size()) {
      throw ValidationError("manifest: field '" + f.name +
                            "' does not list one triplet and spectrum per parameter");
    }
  }
}

void save_manifest(const DatabaseManifest& manifest, const std::filesystem::path& dir) {
  manifest.validate();
  json j;
  j["schema_version"] = 1;
  j["parameters"] = manifest.parameters;
  j["time_grid"] = {{"t_start", manifest.t_start},
                    {"t_end", manifest.t_end},
                    {"count", manifest.snapshot_count}};
  j["fields"] = json::array();
  for (const auto& f : manifest.fields) {
    json jf;
    jf["name"] = f.name;
    jf["rank"] = f.rank;
    jf["mean_path"] = f.mean_path;
    jf["triplet_dirs"] = f.triplet_dirs;
    jf["eigenvalues"] = json::array();
    for (const auto& ev : f.eigenvalues) {
      jf["eigenvalues"].push_back(std::vector<double>(ev.data(), ev.data() + ev.size()));
    }
    j["fields"].push_back(std::move(jf));
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) {
    throw StorageError("cannot open '" + path.string() + "' for writing");
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw StorageError("short write to '" + path.string() + "'");
  }
}

DatabaseManifest load_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) {
    throw StorageError("cannot open '" + path.string() + "' for reading");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }

  DatabaseManifest m;
  try {
    if (j.value("schema_version", 0) != 1) {
      throw FormatError("'" + path.string() + "': unsupported schema_version");
    }
    m.parameters = j.at("parameters").get<std::vector<double>>();
    m.t_start = j.at("time_grid").at("t_start").get<double>();
    m.t_end = j.at("time_grid").at("t_end").get<double>();
    m.snapshot_count = j.at("time_grid").at("count").get<Eigen::Index>();
    for (const auto& jf : j.at("fields")) {
      ManifestField f;
      f.name = jf.at("name").get<std::string>();
      f.rank = jf.at("rank").get<int>();
      f.mean_path = jf.at("mean_path").get<std::string>();
      f.triplet_dirs = jf.at("triplet_dirs").get<std::vector<std::string>>();
      for (const auto& jev : jf.at("eigenvalues")) {
        const auto v = jev.get<std::vector<double>>();
        f.eigenvalues.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
      m.fields.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
  m.validate();

  // A manifest is only valid when every artifact it references checks out.
  for (const auto& f : m.fields) {
    const Eigen::VectorXd mean = read_vector(dir / f.mean_path);
    for (std::size_t i = 0; i < f.triplet_dirs.size(); ++i) {
      const auto tdir = dir / f.triplet_dirs[i];
      const Eigen::MatrixXd phi = read_matrix(tdir / "phi.grom");
      const Eigen::VectorXd sigma = read_vector(tdir / "sigma.grom");
      const Eigen::MatrixXd psi = read_matrix(tdir / "psi.grom");
      if (phi.cols() != f.rank || psi.cols() != f.rank || sigma.size() != f.rank) {
        throw ValidationError("manifest: stored triplet '" + tdir.string() +
                              "' disagrees with declared rank " + std::to_string(f.rank));
      }
      if (phi.rows() != mean.size() || psi.rows() != m.snapshot_count) {
        throw ValidationError("manifest: stored triplet '" + tdir.string() +
                              "' disagrees with mean/time grid dimensions");
      }
    }
  }
  return m;
}

void save_training_database(const TrainingDatabase& db, const std::filesystem::path& dir) {
  db.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw StorageError("cannot create '" + dir.string() + "': " + ec.message());
  }

  ManifestField f;
  f.name = db.field_name;
  f.rank = db.rank;
  f.mean_path = "mean_" + db.field_name + ".grom";
  write_matrix(dir / f.mean_path, db.mean.values);

  for (std::size_t i = 0; i < db.triplets.size(); ++i) {
    const auto& t = db.triplets[i];
    const std::string tdir_name = "triplet_" + db.field_name + "_" + std::to_string(i);
    const auto tdir = dir / tdir_name;
    std::filesystem::create_directories(tdir, ec);
    if (ec) {
      throw StorageError("cannot create '" + tdir.string() + "': " + ec.message());
    }
    write_matrix(tdir / "phi.grom", t.phi);
    write_matrix(tdir / "sigma.grom", t.sigma);
    write_matrix(tdir / "psi.grom", t.psi);
    f.triplet_dirs.push_back(tdir_name);
    f.eigenvalues.push_back(t.eigenvalues);
  }

  DatabaseManifest m;
  const Eigen::VectorXd params = db.parameters();
  m.parameters.assign(params.data(), params.data() + params.size());
  m.t_start = db.times(0);
  m.t_end = db.times(db.times.size() - 1);
  m.snapshot_count = db.times.size();
  m.fields.push_back(std::move(f));
  save_manifest(m, dir);
}

TrainingDatabase load_training_database(const std::filesystem::path& dir,
                                        const std::string& field) {
  const DatabaseManifest m = load_manifest(dir);
  const auto it = std::find_if(m.fields.begin(), m.fields.end(),
                               [&](const ManifestField& f) { return f.name == field; });
  if (it == m.fields.end()) {
    throw ValidationError("database '" + dir.string() + "' has no field '" + field + "'");
  }

  TrainingDatabase db;
  db.field_name = field;
  db.rank = it->rank;
  db.times = Eigen::VectorXd::LinSpaced(m.snapshot_count, m.t_start, m.t_end);
  db.mean = MeanField{field, read_vector(dir / it->mean_path)};
  for (std::size_t i = 0; i < it->triplet_dirs.size(); ++i) {
    const auto tdir = dir / it->triplet_dirs[i];
    PodTriplet t;
    t.parameter = m.parameters[i];
    t.phi = read_matrix(tdir / "phi.grom");
    t.sigma = read_vector(tdir / "sigma.grom");
    t.psi = read_matrix(tdir / "psi.grom");
    t.eigenvalues = it->eigenvalues[i];
    db.triplets.push_back(std::move(t));
  }
  db.validate();
  return db;
}

}  // namespace grom
