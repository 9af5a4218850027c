#include "colforth/formats/manifest.hpp"

#include <fstream>
#include <json.hpp>

#include "colforth/errors.hpp"

namespace colforth::formats {

namespace {

using Json = nlohmann::json;

std::string role_name(ColumnRole role) {
  return role == ColumnRole::Offsets ? "offsets" : "content";
}

}  // namespace

std::filesystem::path write_result(const std::filesystem::path& dir,
                                   const ColumnarResult& result) {
  std::filesystem::create_directories(dir);
  Json columns = Json::array();
  for (std::size_t k = 0; k < result.columns.size(); ++k) {
    const ColumnSnapshot& col = result.columns[k];
    const std::string file = col.name + ".bin";
    std::ofstream out(dir / file, std::ios::binary);
    out.write(reinterpret_cast<const char*>(col.bytes.data()),
              static_cast<std::streamsize>(col.bytes.size()));
    if (!out) throw Error("cannot write " + (dir / file).string());

    Json entry{{"name", col.name},
               {"dtype", std::string(dtype_name(col.dtype))},
               {"length", col.length},
               {"file", file}};
    if (k < result.plan.size()) {
      entry["role"] = role_name(result.plan[k].role);
      entry["path"] = result.plan[k].path;
      if (result.plan[k].role == ColumnRole::Offsets) entry["level"] = result.plan[k].level;
    }
    columns.push_back(entry);
  }
  Json manifest{{"columns", columns}};
  const std::filesystem::path path = dir / "manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
  return path;
}

ColumnarResult read_result(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in)
    throw FormatError(FormatErrorKind::BadManifest,
                      "cannot open " + manifest_file.string());
  Json manifest = Json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("columns"))
    throw FormatError(FormatErrorKind::BadManifest,
                      manifest_file.string() + " is not a column manifest");

  ColumnarResult result;
  const auto dir = manifest_file.parent_path();
  for (const auto& entry : manifest.at("columns")) {
    ColumnSnapshot col;
    col.name = entry.at("name").get<std::string>();
    auto dtype = parse_dtype(entry.at("dtype").get<std::string>());
    if (!dtype)
      throw FormatError(FormatErrorKind::BadManifest,
                        "unknown dtype for column `" + col.name + "`");
    col.dtype = *dtype;
    col.length = entry.at("length").get<std::int64_t>();

    const auto file = dir / entry.at("file").get<std::string>();
    std::ifstream bin(file, std::ios::binary);
    if (!bin)
      throw FormatError(FormatErrorKind::BadManifest, "cannot open " + file.string());
    col.bytes.assign(std::istreambuf_iterator<char>(bin), std::istreambuf_iterator<char>());
    if (col.bytes.size() != static_cast<std::size_t>(col.length) * dtype_width(col.dtype))
      throw FormatError(FormatErrorKind::BadManifest,
                        "column `" + col.name + "` file size does not match its length");

    ColumnPlanEntry plan;
    plan.name = col.name;
    plan.dtype = col.dtype;
    if (entry.contains("role")) {
      plan.role = entry.at("role") == "offsets" ? ColumnRole::Offsets : ColumnRole::Content;
      plan.path = entry.value("path", std::string{});
      plan.level = entry.value("level", -1);
    }
    result.plan.push_back(plan);
    result.columns.push_back(std::move(col));
  }
  return result;
}

std::optional<std::string> results_difference(const ColumnarResult& a,
                                              const ColumnarResult& b) {
  if (a.columns.size() != b.columns.size())
    return "column counts differ: " + std::to_string(a.columns.size()) + " vs " +
           std::to_string(b.columns.size());
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    const auto& ca = a.columns[k];
    const auto& cb = b.columns[k];
    if (ca.name != cb.name) return "column " + std::to_string(k) + " names differ";
    if (ca.dtype != cb.dtype) return "column `" + ca.name + "` dtypes differ";
    if (ca.length != cb.length)
      return "column `" + ca.name + "` lengths differ: " + std::to_string(ca.length) +
             " vs " + std::to_string(cb.length);
    if (ca.bytes != cb.bytes) return "column `" + ca.name + "` bytes differ";
  }
  return std::nullopt;
}

}  // namespace colforth::formats
