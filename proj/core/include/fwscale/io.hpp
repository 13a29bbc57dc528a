#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fwscale/closed_set.hpp"
#include "fwscale/measures.hpp"
#include "fwscale/scaling.hpp"
#include "fwscale/spectral.hpp"
#include "fwscale/walsh.hpp"

namespace fwscale {

// Shortest text that parses back to the same double, at most 17 digits.
std::string FormatDouble(double x);

// Elements: a real is a JSON number; a step map is
// {"A":[{"num":..,"log2den":..},..],"B":[..]}; the step-map unit is
// {"unit":true}. Step-map points may also be given as exact binary
// fractions in decimal.
std::string ElementToJson(const Element& e);
Element ElementFromJson(const std::string& text);

std::string MeasureToJson(const AtomicMeasure& mu);
AtomicMeasure MeasureFromJson(const std::string& text);

std::string SpectrumToJson(const WalshSpectrum& spectrum);

std::string ClosedSetToJson(const ClosedSet& s);
ClosedSet ClosedSetFromJson(const std::string& text);

std::string SpectralMeasureToJson(const SpectralMeasure& nu);
SpectralMeasure SpectralMeasureFromJson(const std::string& text);

std::string EstimatorReportToJson(const EstimatorReport& r);

// `finiteness` may be null when fewer than three levels succeeded.
std::string ReportToJson(const ConvergenceReport& report, const FinitenessResult* finiteness);

// level,c_n,E_leb,max_point_hit,kr_next,cells_mean
std::string LevelsCsv(const ConvergenceReport& report);
// n,t,kr,m_discretization
std::string Condition41Csv(const Condition41Table& table);
// set,p,std_error
std::string ProfileCsv(const std::vector<ClosedSet>& family,
                       const std::vector<EstimatorReport>& values);
// cells,p
std::string SpectralMeasureCsv(const SpectralMeasure& nu);

// Little-endian: uint64 length, then that many float64 values.
void WriteSignFunctionBinary(std::ostream& out, const SignFunction& phi);
SignFunction ReadSignFunctionBinary(std::istream& in);

// Numbers from a JSON array, or whitespace/comma separated text.
std::vector<double> ParseTable(const std::string& text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace fwscale
