#include <cstring>

#include <json.hpp>

#include "gpduo/errors.hpp"
#include "gpduo/fields.hpp"
#include "gpduo/io.hpp"

namespace gpduo::fields {

void write_fields(const std::string& path, const std::vector<const Field2D*>& fields) {
  require(!fields.empty(), "nothing to write");
  const Grid2D g = fields.front()->grid;
  std::string bytes;
  bytes.reserve(fields.size() * g.size() * sizeof(double));
  for (const Field2D* f : fields) {
    require(f->grid == g && f->values.size() == g.size(), "fields must share one grid");
    bytes.append(reinterpret_cast<const char*>(f->values.data()), g.size() * sizeof(double));
  }
  nlohmann::ordered_json side;
  side["n"] = g.n;
  side["extent"] = g.extent;
  side["components"] = fields.size();
  io::atomic_write(path, bytes);
  io::atomic_write(path + ".json", side.dump(2) + "\n");
}

std::vector<Field2D> read_fields(const std::string& path) {
  const auto side = nlohmann::json::parse(io::read_file(path + ".json"));
  const Grid2D g = Grid2D::make(side.at("n").get<std::size_t>(), side.at("extent").get<double>());
  const auto count = side.at("components").get<std::size_t>();
  const std::string bytes = io::read_file(path);
  if (bytes.size() != count * g.size() * sizeof(double))
    fail("IOError", "field file size does not match its sidecar");
  std::vector<Field2D> out;
  for (std::size_t c = 0; c < count; ++c) {
    Field2D f = Field2D::zeros(g);
    std::memcpy(f.values.data(), bytes.data() + c * g.size() * sizeof(double),
                g.size() * sizeof(double));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace gpduo::fields
