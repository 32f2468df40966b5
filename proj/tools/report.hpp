#pragma once

// JSON and CSV emission for the command-line front-end.

#include <filesystem>
#include <json.hpp>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "bilap/lattice.hpp"
#include "bilap/verify.hpp"

namespace bilap::cli {

using nlohmann::ordered_json;

ordered_json index_json(const Index& k, int n);
ordered_json witness_json(const Witness& w, int n);
ordered_json report_json(const EstimateReport& r);

// Flat ratio table: estimate_id,M,trial,x1..xn,y1..yn,quantity,bound,ratio.
void write_samples_csv(std::ostream& os, const std::vector<EstimateReport>& reports);

// Writes `text` to `file`, or to stdout when file is empty.
void emit(const std::filesystem::path& file, const std::string& text);

// Output stream for `file`, or stdout when empty. Throws ParameterError when
// the file cannot be opened.
class OutputFile {
public:
    explicit OutputFile(const std::filesystem::path& file);
    std::ostream& stream();

private:
    std::unique_ptr<std::ostream> owned_;
};

}  // namespace bilap::cli
