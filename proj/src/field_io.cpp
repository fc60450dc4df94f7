#include "panel/field_io.hpp"

#include <bit>
#include <fstream>
#include <json.hpp>
#include <vector>

#include "panel/errors.hpp"

namespace panel {

static_assert(std::endian::native == std::endian::little, "field files are little-endian");

namespace {

using nlohmann::json;

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
  std::filesystem::path p = base;
  p += ext;
  return p;
}

json grid_json(const Grid& g) {
  return {{"nx", g.nx()}, {"ny", g.ny()}, {"lx", g.lx()}, {"ly", g.ly()}};
}

Grid grid_from(const json& j, const std::string& where) {
  try {
    return Grid(j.at("nx").get<int>(), j.at("ny").get<int>(), j.at("lx").get<double>(),
                j.at("ly").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError("grid", where + ": bad grid header (" + e.what() + ")");
  }
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw ConfigError("output", "cannot write " + p.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("file", "cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("file", p.string() + ": " + e.what());
  }
}

void write_doubles(std::ofstream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t n, const std::filesystem::path& p) {
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(double)))
    throw ConfigError("file", p.string() + ": truncated binary payload");
  return v;
}

const char* bc_name(Bc bc) { return bc == Bc::Clamped ? "clamped" : "free"; }

}  // namespace

void write_field(const std::filesystem::path& base, const PlateField& f, double t) {
  json h = {{"grid", grid_json(f.grid())},
            {"dtype", "float64"},
            {"endianness", "little"},
            {"ordering", "row-major, x fastest: index = j*nx + i"},
            {"bc", bc_name(f.bc())},
            {"t", t}};
  write_json(with_ext(base, ".json"), h);
  std::ofstream out(with_ext(base, ".bin"), std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write " + with_ext(base, ".bin").string());
  write_doubles(out, f.values());
}

PlateField read_field(const std::filesystem::path& base) {
  const auto hp = with_ext(base, ".json");
  const json h = read_json(hp);
  if (h.value("dtype", "") != "float64") throw ConfigError("dtype", hp.string() + ": dtype must be float64");
  const Grid g = grid_from(h.at("grid"), hp.string());
  const Bc bc = h.value("bc", "clamped") == "free" ? Bc::Free : Bc::Clamped;
  std::ifstream in(with_ext(base, ".bin"), std::ios::binary);
  if (!in) throw ConfigError("file", "cannot read " + with_ext(base, ".bin").string());
  return PlateField(g, read_doubles(in, g.size(), base), bc);
}

void write_checkpoint(const std::filesystem::path& base, const PlateState& state,
                      const HistoryBuffer& history, double diss_cum, double balance_cum,
                      long step) {
  json times = json::array();
  for (std::size_t i = 0; i < history.size(); ++i) times.push_back(history[i].t);
  json h = {{"grid", grid_json(state.u.grid())},
            {"dtype", "float64"},
            {"endianness", "little"},
            {"layout", "state u, state v, then u and v of each history snapshot"},
            {"t", state.t},
            {"diss_cum", diss_cum},
            {"balance_cum", balance_cum},
            {"step", step},
            {"history_horizon", history.horizon()},
            {"history_dt", history.dt()},
            {"history_times", times}};
  write_json(with_ext(base, ".json"), h);
  std::ofstream out(with_ext(base, ".bin"), std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write " + with_ext(base, ".bin").string());
  write_doubles(out, state.u.values());
  write_doubles(out, state.v.values());
  for (std::size_t i = 0; i < history.size(); ++i) {
    write_doubles(out, history[i].u.values());
    write_doubles(out, history[i].v.values());
  }
}

Checkpoint read_checkpoint(const std::filesystem::path& base) {
  const auto hp = with_ext(base, ".json");
  const json h = read_json(hp);
  const Grid g = grid_from(h.at("grid"), hp.string());
  std::ifstream in(with_ext(base, ".bin"), std::ios::binary);
  if (!in) throw ConfigError("file", "cannot read " + with_ext(base, ".bin").string());
  Checkpoint c(g);
  try {
    c.state.t = h.at("t").get<double>();
    c.diss_cum = h.at("diss_cum").get<double>();
    c.balance_cum = h.at("balance_cum").get<double>();
    c.step = h.at("step").get<long>();
    c.state.u = PlateField(g, read_doubles(in, g.size(), base));
    c.state.v = PlateField(g, read_doubles(in, g.size(), base));
    std::vector<PlateState> snaps;
    for (const auto& t : h.at("history_times")) {
      PlateState s{PlateField(g, read_doubles(in, g.size(), base)),
                   PlateField(g, read_doubles(in, g.size(), base)), t.get<double>()};
      snaps.push_back(std::move(s));
    }
    c.history = HistoryBuffer::restore(h.at("history_horizon").get<double>(),
                                       h.at("history_dt").get<double>(), snaps);
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint", hp.string() + ": " + e.what());
  }
  return c;
}

}  // namespace panel
