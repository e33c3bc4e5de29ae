#include "corpus.hpp"

#include "chor/lang.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace chortest {

std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(CHORC_CORPUS_DIR))
        if (e.is_regular_file() && e.path().extension() == ".chor") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string corpus_path(const std::string& relative) { return (fs::path(CHORC_CORPUS_DIR) / relative).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

chor::Program load_source(const std::string& source) {
    auto pr = chor::parse(source);
    std::string errors;
    if (pr.ok()) {
        for (const auto& d : chor::check_well_formed(pr.program->decl, pr.program->main)) errors += d.format() + "\n";
    } else {
        for (const auto& d : pr.diagnostics) errors += d.format() + "\n";
    }
    if (!errors.empty()) throw std::runtime_error(errors);
    return *pr.program;
}

chor::Program load_program(const std::string& path) {
    try {
        return load_source(slurp(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ":\n" + e.what());
    }
}

} // namespace chortest
