#include "colforth/generators.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "colforth/errors.hpp"

namespace colforth::gen {

namespace {

char fixed_code(Dtype leaf) {
  switch (leaf) {
    case Dtype::Int8: return 'b';
    case Dtype::UInt8: return 'B';
    case Dtype::Int16: return 'h';
    case Dtype::UInt16: return 'H';
    case Dtype::Int32: return 'i';
    case Dtype::UInt32: return 'I';
    case Dtype::Int64: return 'q';
    case Dtype::UInt64: return 'Q';
    case Dtype::Float32: return 'f';
    case Dtype::Float64: return 'd';
    default:
      throw std::invalid_argument("no fixed-width read code for dtype `" +
                                  std::string(dtype_name(leaf)) + "`");
  }
}

void declare_outputs(std::ostringstream& out, const std::vector<ColumnPlanEntry>& plan) {
  for (const auto& col : plan)
    out << "output " << col.name << ' ' << dtype_name(col.dtype) << '\n';
}

void seed_offsets(std::ostringstream& out, const std::vector<ColumnPlanEntry>& plan) {
  for (const auto& col : plan)
    if (col.role == ColumnRole::Offsets) out << "0 " << col.name << " <- stack\n";
}

std::string indent(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

// Avro primitives that can be bulk-read with a counted parse word (the
// zigzag-coded integers cannot).
bool avro_bulk_leaf(const TypeDescriptor& t) {
  return t.kind == TypeDescriptor::Kind::Primitive &&
         (t.dtype == Dtype::Float32 || t.dtype == Dtype::Float64 || t.dtype == Dtype::Bool);
}

char avro_leaf_code(Dtype dt) {
  switch (dt) {
    case Dtype::Bool: return 'b';
    case Dtype::Float32: return 'f';
    case Dtype::Float64: return 'd';
    default:
      throw FormatError(FormatErrorKind::UnsupportedSchema,
                        "no Avro encoding for dtype `" + std::string(dtype_name(dt)) + "`");
  }
}

struct AvroEmitter {
  std::ostringstream& out;
  AvroListMode mode;

  void value(const TypeDescriptor& t, const std::string& path, int level, int depth) {
    switch (t.kind) {
      case TypeDescriptor::Kind::Primitive: primitive(t.dtype, path, depth); break;
      case TypeDescriptor::Kind::List: list(t, path, level, depth); break;
      case TypeDescriptor::Kind::String:
      case TypeDescriptor::Kind::Bytes: string_like(path, level, depth); break;
      case TypeDescriptor::Kind::Record:
        for (std::size_t k = 0; k < t.children.size(); ++k)
          value(t.children[k], path + t.field_names[k] + ".", 0, depth);
        break;
    }
  }

  void primitive(Dtype dt, const std::string& path, int depth) {
    const std::string content = content_column_name(path);
    if (dt == Dtype::Int32 || dt == Dtype::Int64) {
      out << indent(depth) << "data zigzag-> stack\n"
          << indent(depth) << content << " <- stack\n";
    } else {
      out << indent(depth) << "data " << avro_leaf_code(dt) << "-> " << content << '\n';
    }
  }

  void string_like(const std::string& path, int level, int depth) {
    out << indent(depth) << "data zigzag-> stack\n"
        << indent(depth) << "dup " << offsets_column_name(path, level) << " +<- stack\n"
        << indent(depth) << "data #B-> " << content_column_name(path) << '\n';
  }

  void list(const TypeDescriptor& t, const std::string& path, int level, int depth) {
    const TypeDescriptor& child = t.children.front();
    const std::string offsets = offsets_column_name(path, level);
    if (mode == AvroListMode::SingleBlock) {
      out << indent(depth) << "data zigzag-> stack\n"
          << indent(depth) << "dup " << offsets << " +<- stack\n";
      if (avro_bulk_leaf(child)) {
        out << indent(depth) << "data #" << avro_leaf_code(child.dtype) << "-> "
            << content_column_name(path) << '\n';
      } else {
        out << indent(depth) << "0 do\n";
        value(child, path, level + 1, depth + 1);
        out << indent(depth) << "loop\n";
      }
      out << indent(depth) << "data b-> stack drop\n";
      return;
    }
    // general form: accumulate the item total across block runs, then
    // append it once the zero count arrives
    out << indent(depth) << "0\n"
        << indent(depth) << "data zigzag-> stack\n"
        << indent(depth) << "begin\n"
        << indent(depth + 1) << "dup 0= invert\n"
        << indent(depth) << "while\n"
        << indent(depth + 1) << "dup 0 < if\n"
        << indent(depth + 2) << "data zigzag-> stack drop\n"
        << indent(depth + 2) << "negate\n"
        << indent(depth + 1) << "then\n";
    if (avro_bulk_leaf(child)) {
      out << indent(depth + 1) << "dup data #" << avro_leaf_code(child.dtype) << "-> "
          << content_column_name(path) << '\n';
    } else {
      out << indent(depth + 1) << "dup 0 do\n";
      value(child, path, level + 1, depth + 2);
      out << indent(depth + 1) << "loop\n";
    }
    out << indent(depth + 1) << "+\n"
        << indent(depth + 1) << "data zigzag-> stack\n"
        << indent(depth) << "repeat\n"
        << indent(depth) << "drop\n"
        << indent(depth) << offsets << " +<- stack\n";
  }
};

}  // namespace

GeneratedProgram tbasket_program(int depth, Dtype leaf) {
  if (depth < 1) throw std::invalid_argument("nesting depth must be at least 1");
  char code = fixed_code(leaf);
  auto plan = build_column_plan(TypeDescriptor::nested_lists(depth, leaf));

  std::ostringstream out;
  out << "input data\n"
      << "input byte_offsets\n";
  declare_outputs(out, plan);
  seed_offsets(out, plan);
  out << "begin\n"
      << indent(1) << "byte_offsets i-> stack\n"
      << indent(1) << "6 + data seek\n"
      << indent(1) << "data !i-> stack\n"
      << indent(1) << "dup offsets0 +<- stack\n";
  for (int level = 1; level < depth; ++level) {
    out << indent(level) << "0 do\n"
        << indent(level + 1) << "data !i-> stack\n"
        << indent(level + 1) << "dup offsets" << level << " +<- stack\n";
  }
  out << indent(depth) << "data #!" << code << "-> content\n";
  for (int level = depth - 1; level >= 1; --level) out << indent(level) << "loop\n";
  out << "again\n";
  return {out.str(), std::move(plan), {}};
}

GeneratedProgram avro_program(const TypeDescriptor& schema, AvroListMode mode) {
  auto plan = build_column_plan(schema);
  std::ostringstream out;
  out << "input data\n";
  declare_outputs(out, plan);
  seed_offsets(out, plan);
  out << "0 do\n";
  AvroEmitter{out, mode}.value(schema, "", 0, 1);
  out << "loop\n";
  return {out.str(), std::move(plan), {}};
}

GeneratedProgram replevel_decoder(int max_level) {
  if (max_level < 1) throw std::invalid_argument("max level must be at least 1");
  int width = std::bit_width(static_cast<unsigned>(max_level));
  std::ostringstream out;
  out << "input data\n"
      << "output replevels uint8\n"
      << "data I-> stack\n"
      << "begin\n"
      << indent(1) << "data varint-> stack\n"
      << indent(1) << "dup 1 and\n"
      << indent(1) << "0= if\n"
      << indent(2) << "data B-> replevels\n"
      << indent(2) << "1 rshift 1-\n"
      << indent(2) << "replevels dup\n"
      << indent(1) << "else\n"
      << indent(2) << "1 rshift 8 *\n"
      << indent(2) << "data #" << width << "bit-> replevels\n"
      << indent(1) << "then\n"
      << indent(1) << "dup data pos 4 - =\n"
      << "until\n";
  std::vector<ColumnPlanEntry> plan{
      {"replevels", "", ColumnRole::Content, -1, Dtype::UInt8}};
  return {out.str(), std::move(plan), {}};
}

GeneratedProgram replevel_to_offsets(int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  std::ostringstream out;
  out << "input replevels\n";
  for (int k = 0; k < depth; ++k) out << "output offsets" << k << " int32\n";
  for (int k = 0; k < depth; ++k) out << "variable count" << k << '\n';

  auto flush = [&](int level, int ind) {
    out << indent(ind) << "count" << level << " @ offsets" << level
        << " +<- stack 1 count" << level << " !\n";
  };

  out << "begin\n";
  // guard so that an empty input flushes the final counts without a read
  out << indent(1) << "replevels end 0= if\n"
      << indent(2) << "replevels b-> stack\n";
  out << indent(2) << "dup " << depth << " = if\n"
      << indent(3) << "1 count" << depth - 1 << " +!\n"
      << indent(2) << "then\n";
  for (int level = depth - 1; level >= 1; --level) {
    out << indent(2) << "dup " << level << " = if\n"
        << indent(3) << "1 count" << level - 1 << " +!\n";
    for (int m = level; m < depth; ++m) flush(m, 3);
    out << indent(2) << "then\n";
  }
  out << indent(2) << "0 = if\n";
  for (int m = 0; m < depth; ++m) flush(m, 3);
  out << indent(2) << "then\n"
      << indent(1) << "then\n"
      << indent(1) << "replevels end\n"
      << "until\n";
  for (int m = 0; m < depth; ++m) flush(m, 0);

  std::vector<ColumnPlanEntry> plan;
  for (int k = 0; k < depth; ++k)
    plan.push_back({offsets_column_name("", k), "", ColumnRole::Offsets, k, Dtype::Int32});
  return {out.str(), std::move(plan), {}};
}

GeneratedProgram builder_program(const TypeDescriptor& descriptor, BuilderCommandIds ids) {
  if (ids.begin_list == ids.end_list || ids.begin_list == ids.append ||
      ids.end_list == ids.append)
    throw std::invalid_argument("builder command ids must be distinct");
  int depth = descriptor.depth();
  const TypeDescriptor* leaf = &descriptor;
  while (leaf->kind == TypeDescriptor::Kind::List) leaf = &leaf->children.front();
  if (depth < 1 || leaf->kind != TypeDescriptor::Kind::Primitive ||
      !dtype_is_float(leaf->dtype))
    throw std::invalid_argument("builder supports nested lists of one float leaf");

  auto plan = build_column_plan(descriptor);
  std::ostringstream out;
  out << "input data\n";
  declare_outputs(out, plan);
  seed_offsets(out, plan);

  // leaf word: reads the 8-byte value the host placed at the start of `data`
  out << ": node" << depth << '\n'
      << indent(1) << ids.append << " = if\n"
      << indent(2) << "0 data seek\n"
      << indent(2) << "data d-> content\n"
      << indent(1) << "else\n"
      << indent(2) << "halt\n"
      << indent(1) << "then\n"
      << ";\n";
  for (int node = depth - 1; node >= 0; --node) {
    out << ": node" << node << '\n'
        << indent(1) << ids.begin_list << " <> if\n"
        << indent(2) << "halt\n"
        << indent(1) << "then\n"
        << indent(1) << "0\n"
        << indent(1) << "begin\n"
        << indent(2) << "pause dup " << ids.end_list << " = if\n"
        << indent(3) << "drop\n"
        << indent(3) << "offsets" << node << " +<- stack\n"
        << indent(3) << "exit\n"
        << indent(2) << "else\n"
        << indent(3) << "node" << node + 1 << '\n'
        << indent(3) << "1+\n"
        << indent(2) << "then\n"
        << indent(1) << "again\n"
        << ";\n";
  }
  out << "0\n"
      << "begin\n"
      << indent(1) << "pause node0\n"
      << "again\n";

  std::map<std::string, std::int64_t> placeholders{
      {"begin_list", ids.begin_list},
      {"end_list", ids.end_list},
      {"append", ids.append},
  };
  return {out.str(), std::move(plan), std::move(placeholders)};
}

}  // namespace colforth::gen
