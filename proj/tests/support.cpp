#include "support.hpp"

#include <fstream>
#include <sstream>

#include "lcfi/instrument/indexing.hpp"
#include "lcfi/ir/parser.hpp"

namespace lcfi::test {

namespace fs = std::filesystem;

std::string fixture(const std::string& rel) { return (fs::path(LCFI_FIXTURE_DIR) / rel).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lcfi-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ir::IrModule load_indexed(const std::string& path) {
  return instrument::assign_indices(ir::parse_file(path).module);
}

ir::IrModule indexed_from_text(const std::string& text) {
  return instrument::assign_indices(ir::parse_module(text));
}

vm::IoConfig fixture_io(const std::string& name) {
  vm::IoConfig io;
  if (name == "demo") io.files["in.txt"] = fixture("demo/in.txt");
  return io;
}

vm::RunOutcome run_plain(const ir::IrModule& indexed, const vm::IoConfig& io, std::uint64_t budget) {
  vm::ExecOptions opts;
  opts.budget = budget;
  opts.trace = false;
  return vm::execute(instrument::insert_hooks(indexed, instrument::HookMode::Plain), io, nullptr, nullptr, opts);
}

vm::RunOutcome run_profile(const ir::IrModule& indexed, const vm::IoConfig& io, std::uint64_t budget) {
  vm::ExecOptions opts;
  opts.budget = budget;
  return vm::execute(instrument::insert_hooks(indexed, instrument::HookMode::Profiling), io, nullptr, nullptr, opts);
}

}  // namespace lcfi::test
