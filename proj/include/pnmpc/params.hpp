// Copyright 2026 The pnmpc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PNMPC_PARAMS_HPP_
#define PNMPC_PARAMS_HPP_

#include <stdexcept>
#include <string>

namespace pnmpc {

/// Raised when a physical function is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for invalid parameter sets, config files and CLI options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orifice mass-flow constants (ISO 6358 style model).
struct FlowConstants {
  double b = 0.26;         // critical pressure ratio
  double rho_ref = 1.185;  // kg/m^3
  double T_ref = 293.15;   // K
  double T = 293.15;       // K

  /// rho_ref * sqrt(T_ref / T), the factor shared by every branch.
  double density_scale() const;
  void validate() const;
};

/// Sonic conductances in m^3/(s Pa), one per flow path into or out of the
/// receiver ("o"). The main path uses the supply or sink, the leak path the
/// atmosphere.
struct Conductances {
  double so = 2.64e-10;  // supply -> outlet
  double os = 3.44e-10;  // outlet -> sink
  double oa = 6.94e-12;  // outlet -> atmosphere (leak)
  double ao = 4.52e-12;  // atmosphere -> outlet (leak)

  void validate() const;
};

/// Physical description of the positive/negative pressure rig.
/// All pressures are absolute and in Pa.
struct PlantParams {
  double p_sup = 300e3;
  double p_sink = 10e3;
  double p_atm = 100e3;
  double gamma = 1.4;
  double R = 287.0;
  double V = 2.0e-5;
  FlowConstants flow;
  Conductances cond;
  double dz_I = 20.0;  // inflation valve dead zone, duty %
  double dz_D = 25.0;  // deflation valve dead zone, duty %

  /// gamma * R * T / V, converts receiver mass flow to dP/dt.
  double pressure_gain() const;
  void validate() const;
};

}  // namespace pnmpc

#endif  // PNMPC_PARAMS_HPP_
