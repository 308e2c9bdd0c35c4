/** Document shapes served by the sketchopt session API. */

export interface VariableDoc {
  id: number;
  axis_id: number;
  lo: number;
  hi: number;
}

export interface GenerationDoc {
  index: number;
  genomes: number[][];
  objectives: (number[] | null)[];
  ranks: number[];
  front_size: number;
  hypervolume: number;
  best: number[];
}

export interface SessionDoc {
  model: { variables: VariableDoc[] };
  objectives: string[];
  generations: GenerationDoc[];
  front: { genome: number[]; objectives: number[] }[];
  provenance: Record<string, unknown>;
}

export interface LayoutResponse {
  assignment: Record<string, number>;
  polylines: number[][][];
  node_positions: Record<string, number[]>;
  objectives: { labels: string[]; values: number[] | null };
}

/** One scatter point: an individual of the displayed generation. */
export interface PointView {
  genome: number[];
  objectives: number[];
  rank: number;
  onFront: boolean;
}
