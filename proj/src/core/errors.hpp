#pragma once

#include <stdexcept>
#include <string>

namespace bohmex {

// Base for everything the library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridTooNarrow : Error {
    explicit GridTooNarrow(const std::string& m) : Error("GridTooNarrow: " + m) {}
};
struct DegenerateState : Error {
    explicit DegenerateState(const std::string& m) : Error("DegenerateState: " + m) {}
};
struct MixedWidths : Error {
    explicit MixedWidths(const std::string& m) : Error("MixedWidths: " + m) {}
};
struct TooManyParticles : Error {
    explicit TooManyParticles(const std::string& m) : Error("TooManyParticles: " + m) {}
};
struct NotNormalized : Error {
    explicit NotNormalized(const std::string& m) : Error("NotNormalized: " + m) {}
};
struct NonFiniteAmplitude : Error {
    explicit NonFiniteAmplitude(const std::string& m) : Error("NonFiniteAmplitude: " + m) {}
};
struct NodeRegion : Error {
    explicit NodeRegion(const std::string& m) : Error("NodeRegion: " + m) {}
};
struct LeftDomain : Error {
    explicit LeftDomain(const std::string& m) : Error("LeftDomain: " + m) {}
};
struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& m) : Error("TooFewSamples: " + m) {}
};
struct NullAssembly : Error {
    explicit NullAssembly(const std::string& m) : Error("NullAssembly: " + m) {}
};
struct PopulationOverflow : Error {
    explicit PopulationOverflow(const std::string& m) : Error("PopulationOverflow: " + m) {}
};
struct RecordTooShort : Error {
    explicit RecordTooShort(const std::string& m) : Error("RecordTooShort: " + m) {}
};
struct UndefinedFano : Error {
    explicit UndefinedFano(const std::string& m) : Error("UndefinedFano: " + m) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("ConfigError: " + m) {}
};

} // namespace bohmex
