/* SPDX-License-Identifier: Apache-2.0
 *
 * dmisac: bounds and estimators for distributed multi-static ISAC sensing
 * Copyright (C) 2026 The dmisac authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 */

/* The public header must stay valid C. */
#include <stdio.h>

#include "dmisac/dmisac.h"

int main(void)
{
    dmisac_scenario *s = NULL;
    dmisac_status st = dmisac_scenario_from_json("{", &s);
    printf("%s\n", dmisac_status_name(st));
    return st == DMISAC_ERR_PARSE ? 0 : 1;
}
