/**
 * Latest-wins guard for concurrent fetches: a response is rendered only if
 * no newer request has started since it was issued.
 */
export class LatestWins {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
