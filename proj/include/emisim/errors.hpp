#pragma once

#include <stdexcept>
#include <string>

namespace emisim {

/// Base class of everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration input (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Anything that goes wrong while simulating (CLI exit code 3).
class SimulationError : public Error {
public:
    using Error::Error;
};

/// Filesystem trouble: unreadable runs, unwritable outputs (CLI exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

class ConfigParse : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InvalidParams : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Oscillation condition K > 2J violated; the circuit latches instead of oscillating.
class NonOscillating : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class OutOfRange : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class UnderSampled : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class TooShort : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class InvalidSpec : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class LengthMismatch : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class SampleRateMismatch : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class UnitMismatch : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class NegativeInput : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class EmptyBand : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class MissingArtifact : public IoError {
public:
    using IoError::IoError;
};

}  // namespace emisim
