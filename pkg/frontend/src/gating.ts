import type { LifecycleState, Role } from "./types.js";

// The dashboard's own encoding of who may do what when. Buttons are
// gated by this table so the UI never fires a request the server will
// reject for role or state reasons; the integration suite sweeps every
// (role, state) pair against the server's /legality answer to prove the
// two stay identical.

const GAU_ROLES: ReadonlySet<Role> = new Set([
  "Ministry",
  "ProvinceOffice",
  "DistrictOffice",
]);

const TERMINAL: ReadonlySet<LifecycleState> = new Set(["Resolved", "Merged"]);

// Admin verbs in the order the server lists them.
const REVIEW_STAGE = ["Review", "Verify", "Assign", "Update", "AttachDocument"];
const WORK_STAGE = ["Verify", "Assign", "Merge", "Resolve", "Update", "AttachDocument"];

export function isGau(role: Role): boolean {
  return GAU_ROLES.has(role);
}

/**
 * Actions the given role may run on a report in the given state.
 *
 * Everyone with an account can vouch for a live report; only GAU staff
 * get the administrative verbs, which open up once distribution has
 * happened and close again when the report reaches a terminal state.
 */
export function legalActions(role: Role, state: LifecycleState): string[] {
  if (TERMINAL.has(state)) return [];
  if (!GAU_ROLES.has(role)) return ["Verify"];
  if (state === "Submitted") return ["Verify"];
  if (state === "Distributed") return [...REVIEW_STAGE];
  return [...WORK_STAGE]; // UnderReview, Verified
}

/** True when the action is plain confirmation rather than an admin verb. */
export function isVouchOnly(action: string): boolean {
  return action === "Verify";
}
