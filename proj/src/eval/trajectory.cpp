#include "ptinv/eval/trajectory.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

Trajectory trajectory_export(const AudioClip& audio, const InversionModel& model,
                             const std::array<std::string, 3>& dims) {
  Trajectory tr;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto p = param_from_name(dims[i]);
    if (!p) throw std::invalid_argument("unknown parameter name '" + dims[i] + "'");
    tr.dims[i] = *p;
  }
  const ParamTrack track = model.predict(audio);
  for (const auto& b : track.breakpoints()) {
    tr.t.push_back(b.time);
    tr.values.push_back({b.params[tr.dims[0]], b.params[tr.dims[1]], b.params[tr.dims[2]]});
  }
  return tr;
}

void Trajectory::write_csv(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "t," << name_of(dims[0]) << ',' << name_of(dims[1]) << ',' << name_of(dims[2]) << '\n';
  char line[256];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6f,%.9g,%.9g,%.9g\n", t[i], values[i][0], values[i][1], values[i][2]);
    out << line;
  }
  const std::string text = out.str();
  io::write_atomically(path, [&](std::ostream& o) { o << text; });
}

}  // namespace ptinv
