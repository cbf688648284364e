/* SPDX-License-Identifier: Apache-2.0 */

#include <msfault/msfault.h>

int msf_header_compiles_as_c(void) {
  msf_geometry g;
  msf_geometry_default(&g);
  return g.n_rows;
}
