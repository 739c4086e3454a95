#pragma once

#include <filesystem>
#include <string>

#include "lcfi/instrument/hooks.hpp"
#include "lcfi/ir/module.hpp"
#include "lcfi/vm/machine.hpp"

namespace lcfi::test {

std::string fixture(const std::string& rel);
std::string slurp(const std::string& path);
void spit(const std::string& path, const std::string& text);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

ir::IrModule load_indexed(const std::string& path);
ir::IrModule indexed_from_text(const std::string& text);

// Program-visible files for a fixture directory (demo reads in.txt).
vm::IoConfig fixture_io(const std::string& name);

vm::RunOutcome run_plain(const ir::IrModule& indexed, const vm::IoConfig& io, std::uint64_t budget = 100'000'000);
vm::RunOutcome run_profile(const ir::IrModule& indexed, const vm::IoConfig& io, std::uint64_t budget = 100'000'000);

}  // namespace lcfi::test
