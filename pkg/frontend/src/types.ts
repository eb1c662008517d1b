// Payload shapes of the alert server's JSON API. Kept in sync by the
// integration tests, which run against a real server process.

export type Role =
  | "Ministry"
  | "ProvinceOffice"
  | "DistrictOffice"
  | "INGO"
  | "Villager";

export type LifecycleState =
  | "Submitted"
  | "Distributed"
  | "UnderReview"
  | "Verified"
  | "Resolved"
  | "Merged";

export type DisasterKind =
  | "Flood"
  | "BushFire"
  | "Infrastructure"
  | "HumanDisease"
  | "AnimalDisease"
  | "PlantDisease";

export type Severity = "Minor" | "Moderate" | "Severe" | "Extreme";

export interface GeoPoint {
  lat: number;
  lon: number;
}

export interface ReportDict {
  id: string;
  kind: DisasterKind;
  details: Record<string, unknown>;
  location: GeoPoint;
  geometry: GeoPoint[] | null;
  province_id: string;
  district_id: string;
  kumban_id: string | null;
  reporter: string;
  reporter_phone: string;
  description: string;
  created_at: string;
  state: LifecycleState;
  severity: Severity;
  merged_into: string | null;
  attachments: string[];
}

export interface Reliability {
  official: number;
  user: number;
  score: number;
}

/** GET /reports/{id} response: the report plus routing and trust info. */
export interface ReportView {
  report: ReportDict;
  responsible: string;
  topics: string[];
  reliability: Reliability;
}

export interface ActorRow {
  actor_id: string;
  role: Role;
  unit_id: string;
  phone: string;
  name: string;
}

export interface PushMessage {
  topic: string;
  seq: number;
  alert_summary: {
    id: string;
    kind: DisasterKind;
    severity: Severity;
    state: LifecycleState;
    lat: number;
    lon: number;
    headline: string;
    [key: string]: unknown;
  };
}

export type LegalityMatrix = Record<Role, Record<LifecycleState, string[]>>;

/** Map viewport, degrees: [latMin, lonMin, latMax, lonMax]. */
export type Bbox = [number, number, number, number];

export interface ReportFilter {
  kind?: DisasterKind;
  state?: LifecycleState;
  severity?: Severity;
  province?: string;
  district?: string;
}
