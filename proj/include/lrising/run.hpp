#pragma once

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "lrising/config.hpp"

namespace lrising {

enum ExitCode { kExitPass = 0, kExitAssertion = 1, kExitConfig = 2, kExitInternal = 3 };

// Shortest text that reads back to the same double.
std::string fmt(double v);

class CsvWriter
{
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
    std::size_t width_;
};

struct Assertion
{
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation; // how value is compared with threshold
    bool pass = false;
};

struct RunReport
{
    std::vector<Assertion> assertions;
    std::vector<std::string> outputs;

    void check(const std::string& name, double value, const std::string& relation,
               double threshold);
    bool all_pass() const;
};

// Runs the command, writes CSVs and manifest.json under output_dir, returns the exit code.
int run(const ExperimentConfig& cfg, std::ostream& log);

// Manifest for a run that never reached a valid config.
void write_error_manifest(const std::string& dir, const std::string& command, int code,
                          const std::string& type, const std::string& message);

} // namespace lrising
